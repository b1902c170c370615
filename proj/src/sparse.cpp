#include "mdlab/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mdlab {

Eigen::Index frame_count(Eigen::Index samples, int frame_len, double overlap) {
    require(frame_len >= 1, "frame length must be >= 1");
    require(overlap >= 0.0 && overlap < 1.0, "overlap must be in [0, 1)");
    if (samples < frame_len) throw ParameterError("signal shorter than one frame");
    const Eigen::Index whole = samples / frame_len;
    const double steps = static_cast<double>(whole - 1) / (1.0 - overlap);
    return static_cast<Eigen::Index>(std::floor(steps + 1e-9)) + 1;
}

MatrixXc split_frames(const VectorXc& x, int frame_len, double overlap) {
    const Eigen::Index u = frame_count(x.size(), frame_len, overlap);
    const double stride = frame_len * (1.0 - overlap);
    MatrixXc frames(frame_len, u);
    for (Eigen::Index j = 0; j < u; ++j) {
        const auto start = static_cast<Eigen::Index>(std::floor(static_cast<double>(j) * stride + 1e-9));
        frames.col(j) = x.segment(start, frame_len);
    }
    return frames;
}

FrameMatrix stack_cells(const std::vector<MatrixXc>& per_cell, int frame_len) {
    require(!per_cell.empty(), "no cells to stack");
    const Eigen::Index u = per_cell.front().cols();
    FrameMatrix out;
    out.frame_len = frame_len;
    out.cells = static_cast<int>(per_cell.size());
    out.data.resize(2 * frame_len * out.cells, u);
    for (std::size_t i = 0; i < per_cell.size(); ++i) {
        const MatrixXc& y = per_cell[i];
        if (y.rows() != frame_len) throw ParameterError("cell frame length mismatch");
        if (y.cols() != u) throw ParameterError("cells have different frame counts");
        const auto r0 = static_cast<Eigen::Index>(2 * frame_len * i);
        out.data.middleRows(r0, frame_len) = y.real();
        out.data.middleRows(r0 + frame_len, frame_len) = y.imag();
    }
    return out;
}

std::vector<MatrixXc> unstack_cells(const FrameMatrix& f) {
    require(f.data.rows() == 2 * f.frame_len * f.cells, "frame matrix rows must equal 2KN");
    std::vector<MatrixXc> out;
    for (int i = 0; i < f.cells; ++i) {
        const Eigen::Index r0 = 2 * f.frame_len * i;
        MatrixXc y(f.frame_len, f.data.cols());
        y.real() = f.data.middleRows(r0, f.frame_len);
        y.imag() = f.data.middleRows(r0 + f.frame_len, f.frame_len);
        out.push_back(std::move(y));
    }
    return out;
}

FrameMatrix frames_from_slow_time(const MatrixXc& block, int frame_len, double overlap) {
    std::vector<MatrixXc> cells;
    cells.reserve(static_cast<std::size_t>(block.rows()));
    for (Eigen::Index i = 0; i < block.rows(); ++i) cells.push_back(split_frames(block.row(i).transpose(), frame_len, overlap));
    return stack_cells(cells, frame_len);
}

void normalize_frames(FrameMatrix& f) {
    if (f.data.cols() == 0) return;
    const double energy = f.data.squaredNorm() / static_cast<double>(f.data.cols());
    if (energy > 0.0) f.data /= std::sqrt(energy);
}

// ---------------------------------------------------------------------------

namespace {

inline double soft_threshold(double z, double t) {
    if (z > t) return z - t;
    if (z < -t) return z + t;
    return 0.0;
}

}  // namespace

LassoCoder::LassoCoder(const Eigen::MatrixXd& atoms) : dict_(atoms), rows_(atoms.rows()) {
    gram_.noalias() = atoms.transpose() * atoms;
}

void LassoCoder::solve_column(const Eigen::Ref<const Eigen::VectorXd>& c, double y_sq, double xi,
                              Eigen::Ref<Eigen::VectorXd> alpha, const LassoOptions& opt) const {
    const Eigen::Index J = gram_.rows();
    // g = D^T (y - D alpha)
    Eigen::VectorXd g = c;
    if (alpha.any()) g.noalias() -= gram_ * alpha;

    auto update = [&](Eigen::Index j) {
        const double gjj = gram_(j, j);
        const double old = alpha(j);
        const double fresh = gjj > 0.0 ? soft_threshold(g(j) + gjj * old, xi) / gjj : 0.0;
        const double delta = fresh - old;
        if (delta != 0.0) {
            alpha(j) = fresh;
            g.noalias() -= delta * gram_.col(j);
        }
        return std::abs(delta);
    };

    auto duality_gap = [&]() {
        const double ac = alpha.dot(c);
        const double r_sq = std::max(0.0, y_sq - ac - alpha.dot(g));
        const double y_dot_r = y_sq - ac;
        const double gmax = g.cwiseAbs().maxCoeff();
        const double s = gmax > xi ? xi / gmax : 1.0;
        return 0.5 * r_sq * (1.0 + s * s) + xi * alpha.lpNorm<1>() - s * y_dot_r;
    };

    std::vector<Eigen::Index> active;
    for (int pass = 0; pass < opt.max_passes; ++pass) {
        double max_delta = 0.0;
        for (Eigen::Index j = 0; j < J; ++j) max_delta = std::max(max_delta, update(j));
        if (duality_gap() <= opt.gap_tol) return;
        if (max_delta == 0.0) return;

        active.clear();
        for (Eigen::Index j = 0; j < J; ++j)
            if (alpha(j) != 0.0) active.push_back(j);
        for (int inner = 0; inner < 1000; ++inner) {
            double d = 0.0;
            for (Eigen::Index j : active) d = std::max(d, update(j));
            if (d <= 1e-3 * max_delta || d == 0.0) break;
        }
    }
}

Eigen::MatrixXd LassoCoder::code(const Eigen::MatrixXd& y, double xi, const LassoOptions& opt,
                                 const Eigen::MatrixXd* warm) const {
    if (y.rows() != rows_) throw ParameterError("dictionary and data row counts differ");
    require(xi > 0.0, "Lasso regularizer must be positive");
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(gram_.rows(), y.cols());
    if (warm != nullptr) {
        if (warm->rows() != a.rows() || warm->cols() != a.cols()) throw ParameterError("warm start has wrong shape");
        a = *warm;
    }
    const Eigen::MatrixXd corr = dict_.transpose() * y;
    for (Eigen::Index m = 0; m < y.cols(); ++m) {
        const double y_sq = y.col(m).squaredNorm();
        if (y_sq == 0.0) {
            a.col(m).setZero();
            continue;
        }
        solve_column(corr.col(m), y_sq, xi, a.col(m), opt);
    }
    return a;
}

SparseCodes sparse_code(const Dictionary& dict, const FrameMatrix& y, double xi, const LassoOptions& opt) {
    if (dict.atoms.rows() != y.data.rows()) throw ParameterError("dictionary and data row counts differ");
    LassoCoder coder(dict.atoms);
    return {coder.code(y.data, xi, opt), xi};
}

double lasso_objective(const Eigen::MatrixXd& atoms, const Eigen::MatrixXd& codes, const Eigen::MatrixXd& y,
                       double xi) {
    return 0.5 * (atoms * codes - y).squaredNorm() + xi * codes.cwiseAbs().sum();
}

// ---------------------------------------------------------------------------

namespace {

void project_unit_ball(Eigen::Ref<Eigen::VectorXd> d) {
    const double n = d.norm();
    if (n > 1.0) d /= n;
}

}  // namespace

DictLearnResult learn_dictionary(const FrameMatrix& y, const DictLearnOptions& opt, Rng& rng) {
    require(opt.atoms >= 1, "atom count must be >= 1");
    require(y.data.cols() >= 1 && y.data.rows() >= 1, "training data is empty");
    const Eigen::Index rows = y.data.rows();
    const Eigen::Index U = y.data.cols();
    const Eigen::Index J = opt.atoms;

    std::vector<Eigen::Index> order(static_cast<std::size_t>(U));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::shuffle(order.begin(), order.end(), rng);

    Eigen::MatrixXd init(rows, J);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (Eigen::Index j = 0; j < J; ++j) {
        if (j < U) init.col(j) = y.data.col(order[static_cast<std::size_t>(j)]);
        else init.col(j).setZero();
        if (init.col(j).norm() == 0.0) {
            for (Eigen::Index r = 0; r < rows; ++r) init(r, j) = gauss(rng);
        }
    }
    return learn_dictionary(y, std::move(init), opt);
}

DictLearnResult learn_dictionary(const FrameMatrix& y, Eigen::MatrixXd atoms, const DictLearnOptions& opt) {
    require(atoms.rows() == y.data.rows(), "initial dictionary has the wrong row count");
    require(opt.xi > 0.0, "Lasso regularizer must be positive");
    for (Eigen::Index j = 0; j < atoms.cols(); ++j) {
        const double n = atoms.col(j).norm();
        if (n > 0.0) atoms.col(j) /= n;
    }
    const Eigen::Index J = atoms.cols();
    const Eigen::MatrixXd& Y = y.data;

    DictLearnResult res;
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(J, Y.cols());
    for (int it = 0; it < opt.max_iters; ++it) {
        {
            LassoCoder coder(atoms);
            A = coder.code(Y, opt.xi, opt.lasso, &A);
        }
        const double f = lasso_objective(atoms, A, Y, opt.xi);
        res.objective.push_back(f);
        if (res.objective.size() >= 2) {
            const double prev = res.objective[res.objective.size() - 2];
            if (prev - f <= opt.tol * std::max(prev, 1e-300)) break;
        }
        if (it + 1 == opt.max_iters) break;

        const Eigen::MatrixXd C = A * A.transpose();
        const Eigen::MatrixXd B = Y * A.transpose();

        std::vector<Eigen::Index> dead;
        for (Eigen::Index j = 0; j < J; ++j) {
            if (C(j, j) <= 1e-12) {
                dead.push_back(j);
                continue;
            }
            Eigen::VectorXd u = atoms.col(j) + (B.col(j) - atoms * C.col(j)) / C(j, j);
            project_unit_ball(u);
            atoms.col(j) = u;
        }
        if (!dead.empty()) {
            const Eigen::VectorXd resid = (atoms * A - Y).colwise().squaredNorm().transpose();
            std::vector<Eigen::Index> worst(static_cast<std::size_t>(Y.cols()));
            std::iota(worst.begin(), worst.end(), Eigen::Index{0});
            std::stable_sort(worst.begin(), worst.end(),
                             [&](Eigen::Index a, Eigen::Index b) { return resid(a) > resid(b); });
            std::size_t next = 0;
            for (Eigen::Index j : dead) {
                while (next < worst.size() && Y.col(worst[next]).norm() == 0.0) ++next;
                if (next >= worst.size()) {
                    atoms.col(j).setZero();
                    continue;
                }
                atoms.col(j) = Y.col(worst[next]).normalized();
                ++next;
            }
        }
    }
    res.dictionary.atoms = std::move(atoms);
    res.dictionary.atoms_per_block = static_cast<int>(J);
    res.dictionary.block_labels.assign(static_cast<std::size_t>(J), 0);
    res.dictionary.xi = opt.xi;
    res.codes = {std::move(A), opt.xi};
    return res;
}

Dictionary merge_dictionaries(const std::vector<Dictionary>& parts, const std::vector<double>& directions_deg) {
    require(!parts.empty(), "need at least one dictionary to merge");
    require(parts.size() == directions_deg.size(), "one direction per dictionary required");
    const Eigen::Index rows = parts.front().atoms.rows();
    Eigen::Index total = 0;
    for (const Dictionary& d : parts) {
        if (d.atoms.rows() != rows) throw ParameterError("dictionaries have different row counts");
        total += d.atoms.cols();
    }
    Dictionary m;
    m.atoms.resize(rows, total);
    m.atoms_per_block = static_cast<int>(parts.front().atoms.cols());
    m.xi = parts.front().xi;
    m.seed = parts.front().seed;
    m.basic_directions_deg = directions_deg;
    Eigen::Index col = 0;
    for (std::size_t c = 0; c < parts.size(); ++c) {
        const Eigen::Index n = parts[c].atoms.cols();
        if (n != m.atoms_per_block) m.atoms_per_block = 0;
        m.atoms.middleCols(col, n) = parts[c].atoms;
        m.block_labels.insert(m.block_labels.end(), static_cast<std::size_t>(n), static_cast<int>(c));
        col += n;
    }
    return m;
}

EnergySignature energy_signature(const SparseCodes& codes, const Dictionary& merged, SignatureNorm norm) {
    const auto C = static_cast<std::size_t>(merged.block_count());
    require(C >= 1, "merged dictionary carries no basic directions");
    if (merged.block_labels.size() != static_cast<std::size_t>(codes.coefficients.rows()))
        throw ParameterError("coefficient rows do not match the dictionary labels");
    EnergySignature s;
    s.values = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(C));
    s.basic_directions_deg = merged.basic_directions_deg;
    for (Eigen::Index i = 0; i < codes.coefficients.rows(); ++i) {
        const int c = merged.block_labels[static_cast<std::size_t>(i)];
        if (c < 0 || static_cast<std::size_t>(c) >= C) throw ParameterError("block label out of range");
        s.values(c) += norm == SignatureNorm::squared ? codes.coefficients.row(i).squaredNorm()
                                                      : codes.coefficients.row(i).cwiseAbs().sum();
    }
    return s;
}

}  // namespace mdlab

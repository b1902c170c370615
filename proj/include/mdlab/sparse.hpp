#pragma once

#include <cstdint>
#include <vector>

#include "mdlab/common.hpp"
#include "mdlab/random.hpp"

namespace mdlab {

/// Number of frames produced by split_frames: the signal is truncated to
/// floor(X/K) whole frames and frames start every K(1 - overlap) samples.
/// For 50% overlap this is 2 floor(X/K) - 1.
Eigen::Index frame_count(Eigen::Index samples, int frame_len, double overlap);

/// K x U matrix of overlapping frames of one slow-time signal.
MatrixXc split_frames(const VectorXc& x, int frame_len, double overlap);

/// Real 2KN x U sample matrix: row blocks Re{Y_1}, Im{Y_1}, Re{Y_2}, ...
struct FrameMatrix {
    Eigen::MatrixXd data;
    int frame_len = 0;
    int cells = 0;
};

FrameMatrix stack_cells(const std::vector<MatrixXc>& per_cell, int frame_len);
std::vector<MatrixXc> unstack_cells(const FrameMatrix& frames);

/// Splits every row of an N x X slow-time block and stacks the cells.
FrameMatrix frames_from_slow_time(const MatrixXc& block, int frame_len, double overlap);

/// Scales the sample matrix to unit mean column energy (receiver gain
/// control ahead of sparse coding). An all-zero matrix is left unchanged.
void normalize_frames(FrameMatrix& frames);

struct Dictionary {
    Eigen::MatrixXd atoms;                    ///< 2KN x (J or J*C), columns are atoms
    std::vector<int> block_labels;            ///< per atom: index of its basic direction
    std::vector<double> basic_directions_deg; ///< one per block
    int atoms_per_block = 0;                  ///< J
    double xi = 0.0;
    std::uint64_t seed = 0;

    Eigen::Index atom_count() const { return atoms.cols(); }
    int block_count() const { return static_cast<int>(basic_directions_deg.size()); }
};

struct SparseCodes {
    Eigen::MatrixXd coefficients;  ///< atoms x samples
    double xi = 0.0;
};

struct LassoOptions {
    double gap_tol = 1e-8;   ///< absolute duality gap per column
    int max_passes = 20000;  ///< full coordinate sweeps per column
};

/// Coordinate-descent Lasso over a fixed dictionary,
///   min_a 0.5 ||D a - y||^2 + xi ||a||_1   (independently per column).
/// The Gram matrix is formed once and reused for every call.
class LassoCoder {
public:
    explicit LassoCoder(const Eigen::MatrixXd& atoms);

    /// Codes every column of `samples`. `warm` (atoms x samples) seeds the
    /// iteration when given; the objective never exceeds its warm value.
    Eigen::MatrixXd code(const Eigen::MatrixXd& samples, double xi, const LassoOptions& opt = {},
                         const Eigen::MatrixXd* warm = nullptr) const;

    /// Solves one column in place given c = D^T y and y^T y.
    void solve_column(const Eigen::Ref<const Eigen::VectorXd>& correlation, double y_sq, double xi,
                      Eigen::Ref<Eigen::VectorXd> alpha, const LassoOptions& opt) const;

    Eigen::Index atoms() const { return gram_.rows(); }
    Eigen::Index rows() const { return rows_; }

private:
    Eigen::MatrixXd dict_;
    Eigen::MatrixXd gram_;
    Eigen::Index rows_;
};

/// Per-column Lasso of `y` in `dict`.
SparseCodes sparse_code(const Dictionary& dict, const FrameMatrix& y, double xi, const LassoOptions& opt = {});

/// 0.5 ||D A - Y||_F^2 + xi sum ||a_m||_1
double lasso_objective(const Eigen::MatrixXd& atoms, const Eigen::MatrixXd& codes, const Eigen::MatrixXd& samples,
                       double xi);

struct DictLearnOptions {
    int atoms = 750;
    double xi = 0.13;
    int max_iters = 50;
    double tol = 1e-6;  ///< relative objective decrease
    LassoOptions lasso{};
};

struct DictLearnResult {
    Dictionary dictionary;
    SparseCodes codes;
    std::vector<double> objective;  ///< after every sparse-coding step
};

/// Alternates Lasso coding and block-coordinate atom updates under ||d_j|| <= 1.
/// Atoms start from distinct random training columns; an atom left unused
/// for a full pass is replaced by the worst-reconstructed training column.
DictLearnResult learn_dictionary(const FrameMatrix& y, const DictLearnOptions& opt, Rng& rng);

/// Same alternation from an explicit starting dictionary (columns normalized).
DictLearnResult learn_dictionary(const FrameMatrix& y, Eigen::MatrixXd init_atoms, const DictLearnOptions& opt);

/// Horizontal concatenation [D^1, ..., D^C] with per-atom block labels.
Dictionary merge_dictionaries(const std::vector<Dictionary>& per_direction, const std::vector<double>& directions_deg);

struct EnergySignature {
    Eigen::VectorXd values;
    std::vector<double> basic_directions_deg;
};

enum class SignatureNorm { squared, absolute };

/// beta_c = sum over samples and over atoms of block c of |alpha|^2
/// (or |alpha| with SignatureNorm::absolute).
EnergySignature energy_signature(const SparseCodes& codes, const Dictionary& merged,
                                 SignatureNorm norm = SignatureNorm::squared);

}  // namespace mdlab

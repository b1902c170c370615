#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>

#include "mdlab/array.hpp"
#include "mdlab/echo.hpp"
#include "mdlab/harness.hpp"
#include "mdlab/io.hpp"
#include "mdlab/locomotion.hpp"
#include "mdlab/regress.hpp"
#include "mdlab/sparse.hpp"

using namespace mdlab;

namespace {

RadarScene scene_arg(const std::string& s) {
    if (std::filesystem::exists(s)) return scene_from_json(read_json_file(s));
    return preset_scene(parse_grid_layout(s));
}

double snr_arg(const std::string& s) {
    if (s == "inf" || s == "+inf") return kNoNoise;
    return std::stod(s);
}

ExperimentConfig config_arg(const std::string& path, std::uint64_t* seed, int workers) {
    ExperimentConfig c = path.empty() ? ExperimentConfig{} : load_config(path);
    if (seed != nullptr) c.seed = *seed;
    if (workers > 0) c.workers = workers;
    return c;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Pedestrian direction-of-motion estimation from MIMO radar micro-Doppler signatures"};
    app.require_subcommand(1);

    // walk
    auto* walk = app.add_subcommand("walk", "synthesize a pedestrian trajectory (CSV)");
    PedestrianParams wp;
    double w_duration = 4.0, w_dt = 1e-3, w_range = 100.0;
    std::uint64_t w_seed = 1;
    std::string w_out = "trajectory.csv";
    walk->add_option("--height", wp.height_m, "body height in m")->capture_default_str();
    walk->add_option("--speed", wp.speed_mps, "walking speed in m/s")->capture_default_str();
    walk->add_option("--direction", wp.direction_deg, "direction of motion in degrees")->capture_default_str();
    walk->add_option("--duration", w_duration, "seconds")->capture_default_str();
    walk->add_option("--dt", w_dt, "time step in seconds")->capture_default_str();
    walk->add_option("--range", w_range, "range of the mid-walk position in m")->capture_default_str();
    walk->add_option("--seed", w_seed)->capture_default_str();
    walk->add_flag("--distort", wp.distortion.enabled, "enable height, speed and heading distortions");
    walk->add_option("-o,--out", w_out)->capture_default_str();
    walk->callback([&] {
        ExperimentConfig c;
        c.height_m = wp.height_m;
        c.speed_mps = wp.speed_mps;
        c.distortion = wp.distortion;
        c.total_time_s = w_duration;
        c.range_m = w_range;
        const PedestrianParams p = centered_walk(c, wp.direction_deg);
        Rng rng(w_seed);
        write_trajectory_csv(w_out, synth_walk(p, w_duration, w_dt, rng));
    });

    // beampattern
    auto* bp = app.add_subcommand("beampattern", "two-way beam pattern (CSV) and its summary (JSON)");
    double b_az = 4.0, b_el = 1.0, b_step = 0.01;
    SphericalPoint b_steer{100.0, 0.0, 0.0};
    bool b_simo = false;
    std::string b_out = "beampattern.csv", b_summary = "beampattern.json";
    bp->add_option("--az-max", b_az, "azimuth half-span in degrees")->capture_default_str();
    bp->add_option("--el-max", b_el, "elevation half-span in degrees")->capture_default_str();
    bp->add_option("--step", b_step, "grid step in degrees")->capture_default_str();
    bp->add_option("--steer-az", b_steer.azimuth_deg)->capture_default_str();
    bp->add_option("--steer-el", b_steer.elevation_deg)->capture_default_str();
    bp->add_flag("--simo", b_simo, "single transmit element instead of the 4x1 transmit array");
    bp->add_option("-o,--out", b_out)->capture_default_str();
    bp->add_option("--summary", b_summary)->capture_default_str();
    bp->callback([&] {
        const RadarScene s = preset_scene(GridLayout::full3d_8);
        const UraGeometry tx = b_simo ? UraGeometry{1, 1, 0.5, 0.5} : s.tx;
        const BeamPattern p = beam_pattern(tx, s.rx, b_steer, ScanGrid::uniform(b_az, b_el, b_step));
        write_text_file(b_out, beam_pattern_csv(p));
        json j;
        j["hpbw_az_deg"] = half_power_beamwidth(p, PatternAxis::azimuth);
        j["hpbw_el_deg"] = half_power_beamwidth(p, PatternAxis::elevation);
        j["worst_sidelobe_db_in_fov"] = worst_sidelobe_db(p);
        write_json_file(b_summary, j);
        std::cout << j.dump(2) << '\n';
    });

    // simulate
    auto* sim = app.add_subcommand("simulate", "slow-time cube from a trajectory");
    std::string s_scene = "full3d_8", s_traj, s_out = "cube.bin", s_spec;
    std::string s_snr = "inf";
    std::uint64_t s_seed = 1;
    int s_cell = 0;
    sim->add_option("--scene", s_scene, "layout tag or scene JSON file")->capture_default_str();
    sim->add_option("--trajectory", s_traj)->required();
    sim->add_option("--snr", s_snr, "per-sample SNR in dB, or inf")->capture_default_str();
    sim->add_option("--seed", s_seed)->capture_default_str();
    sim->add_option("-o,--out", s_out)->capture_default_str();
    sim->add_option("--spectrogram", s_spec, "write the spectrogram of one cell to this CSV");
    sim->add_option("--cell", s_cell, "cell index for --spectrogram")->capture_default_str();
    sim->callback([&] {
        RadarScene scene = scene_arg(s_scene);
        const TrajectoryTensor traj = read_trajectory_csv(s_traj);
        scene.timing.total_pulses = static_cast<long>(traj.steps());
        Rng rng(s_seed);
        const SlowTimeCube cube = add_noise(synth_slow_time(scene, traj), snr_arg(s_snr), rng);
        write_cube(s_out, cube);
        if (!s_spec.empty()) {
            if (s_cell < 0 || s_cell >= cube.cells()) throw ParameterError("--cell is outside the grid");
            write_spectrogram_csv(s_spec, spectrogram(cube.data.row(s_cell).transpose(), cube.pri_s));
        }
    });

    // dict-learn
    auto* dl = app.add_subcommand("dict-learn", "per-direction dictionaries from basic-direction cubes, merged");
    std::vector<std::string> d_cubes;
    FeatureParams d_fp;
    d_fp.atoms = 128;
    std::uint64_t d_seed = 1;
    std::string d_out = "dictionary.bin";
    dl->add_option("--cubes", d_cubes, "one cube per basic direction")->required();
    dl->add_option("--atoms", d_fp.atoms, "atoms per direction")->capture_default_str();
    dl->add_option("--xi", d_fp.xi)->capture_default_str();
    dl->add_option("--frame-len", d_fp.frame_len)->capture_default_str();
    dl->add_option("--overlap", d_fp.overlap)->capture_default_str();
    dl->add_option("--iters", d_fp.dict_max_iters)->capture_default_str();
    dl->add_option("--tol", d_fp.dict_tol)->capture_default_str();
    dl->add_option("--seed", d_seed)->capture_default_str();
    dl->add_option("-o,--out", d_out)->capture_default_str();
    dl->callback([&] {
        std::vector<Dictionary> dicts;
        std::vector<double> dirs;
        for (std::size_t k = 0; k < d_cubes.size(); ++k) {
            const SlowTimeCube cube = read_cube(d_cubes[k]);
            FrameMatrix y = frames_from_slow_time(cube.data, d_fp.frame_len, d_fp.overlap);
            scale_frames(y, d_fp.scaling);
            DictLearnOptions opt;
            opt.atoms = d_fp.atoms;
            opt.xi = d_fp.xi;
            opt.max_iters = d_fp.dict_max_iters;
            opt.tol = d_fp.dict_tol;
            Rng rng = make_rng(d_seed, {k});
            DictLearnResult r = learn_dictionary(y, opt, rng);
            std::cerr << "direction " << cube.truth_direction_deg << ": objective " << r.objective.front() << " -> "
                      << r.objective.back() << " in " << r.objective.size() << " iterations\n";
            dicts.push_back(std::move(r.dictionary));
            dirs.push_back(cube.truth_direction_deg);
        }
        Dictionary merged = merge_dictionaries(dicts, dirs);
        merged.seed = d_seed;
        write_dictionary(d_out, merged);
    });

    // features
    auto* ft = app.add_subcommand("features", "energy signatures of T_F blocks (CSV)");
    std::string f_dict, f_out = "features.csv";
    std::vector<std::string> f_cubes;
    FeatureParams f_fp;
    double f_tf = 1.0;
    ft->add_option("--dict", f_dict)->required();
    ft->add_option("--cubes", f_cubes)->required();
    ft->add_option("--block-time", f_tf, "T_F in seconds")->capture_default_str();
    ft->add_option("--xi", f_fp.xi)->capture_default_str();
    ft->add_option("--frame-len", f_fp.frame_len)->capture_default_str();
    ft->add_option("--overlap", f_fp.overlap)->capture_default_str();
    ft->add_option("-o,--out", f_out)->capture_default_str();
    ft->callback([&] {
        const Dictionary dict = read_dictionary(f_dict);
        const LassoCoder coder(dict.atoms);
        std::vector<FeatureRow> rows;
        for (const std::string& path : f_cubes) {
            const auto r = block_signatures(read_cube(path), coder, dict, f_fp, f_tf);
            rows.insert(rows.end(), r.begin(), r.end());
        }
        write_features_csv(f_out, rows);
    });

    // train
    auto* tr = app.add_subcommand("train", "cross-validate the regressor grid and fit the best model (JSON)");
    std::string t_features, t_config, t_out = "model.json";
    std::uint64_t t_seed = 1;
    tr->add_option("--features", t_features)->required();
    tr->add_option("--config", t_config, "experiment config whose regressor grid is used");
    tr->add_option("--seed", t_seed)->capture_default_str();
    tr->add_option("-o,--out", t_out)->capture_default_str();
    tr->callback([&] {
        const ExperimentConfig c = config_arg(t_config, nullptr, 0);
        const RegressionDataset data = to_dataset(read_features_csv(t_features), "regr_train");
        Rng cv = make_rng(t_seed, {1});
        const CrossValResult res = crossval_2fold(data, c.regressors, cv);
        for (std::size_t g = 0; g < c.regressors.size(); ++g)
            std::cerr << describe(c.regressors[g]) << ": " << res.mean_error_deg[g] << " deg\n";
        Rng fit = make_rng(t_seed, {2});
        json j = to_json(train_regressor(data, c.regressors[res.best_index], fit));
        j["crossval_mean_error_deg"] = res.mean_error_deg;
        write_json_file(t_out, j);
    });

    // evaluate
    auto* ev = app.add_subcommand("evaluate", "score a model on test features");
    std::string e_model, e_features, e_out = "results.csv", e_tag = "custom", e_snr = "inf";
    double e_tf = 1.0;
    ev->add_option("--model", e_model)->required();
    ev->add_option("--features", e_features)->required();
    ev->add_option("--config-tag", e_tag)->capture_default_str();
    ev->add_option("--snr", e_snr, "recorded in the results table")->capture_default_str();
    ev->add_option("--block-time", e_tf, "recorded in the results table")->capture_default_str();
    ev->add_option("-o,--out", e_out)->capture_default_str();
    ev->callback([&] {
        const Regressor m = regressor_from_json(read_json_file(e_model));
        std::vector<ResultRecord> records;
        for (const FeatureRow& f : read_features_csv(e_features)) {
            ResultRecord r;
            r.direction_deg = f.direction_deg;
            r.snr_db = snr_arg(e_snr);
            r.frame_time_s = e_tf;
            r.config_tag = e_tag;
            r.trial_id = f.frame_block_id;
            r.predicted_deg = m.predict(f.beta);
            r.circ_error_deg = circular_error(r.direction_deg, r.predicted_deg);
            records.push_back(r);
        }
        write_text_file(e_out, results_csv(records));
        SummaryRow row = summarize(records, "point");
        row.regressor = describe(m.spec);
        std::cout << summary_csv({row});
    });

    // run / sweep
    auto* run = app.add_subcommand("run", "full pipeline at the first value of every grid");
    auto* sw = app.add_subcommand("sweep", "full pipeline along one axis");
    std::string r_config, r_out = "out", r_axis = "snr";
    std::uint64_t r_seed = 0;
    int r_workers = 0;
    for (CLI::App* sub : {run, sw}) {
        sub->add_option("--config", r_config)->required();
        sub->add_option("-o,--out", r_out, "output directory")->capture_default_str();
        sub->add_option("--seed", r_seed, "overrides the config seed");
        sub->add_option("--workers", r_workers, "overrides MDLAB_WORKERS");
    }
    sw->add_option("--axis", r_axis, "snr, observation_time or radar_config")->capture_default_str();
    auto pipeline = [&](bool is_sweep) {
        const ExperimentConfig c = config_arg(r_config, run->count("--seed") + sw->count("--seed") ? &r_seed : nullptr,
                                              r_workers);
        const SweepOutput out = is_sweep ? sweep(c, parse_sweep_axis(r_axis)) : run_pipeline(c);
        write_outputs(r_out, c, out);
        std::cout << summary_csv(out.summary);
    };
    run->callback([&] { pipeline(false); });
    sw->callback([&] { pipeline(true); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const StageError& e) {
        std::cerr << "error in stage " << e.stage() << ": " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}

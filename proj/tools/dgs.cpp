// Command-line front end: synth-dataset, train, render, annotate, eval.

#include "dgs/dgs.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

namespace {

using namespace dgs;
using io::fs::path;

struct Globals {
    std::uint64_t seed = 0;
    bool seed_set = false;
    int threads = 1;
    std::string config;
};

json read_json(const path& p) {
    try {
        return json::parse(io::read_text(p));
    } catch (const json::exception& e) {
        throw Error(p.string() + ": " + e.what());
    }
}

std::vector<double> parse_numbers(const std::string& s) {
    std::vector<double> v;
    std::string tok;
    std::istringstream ss(s);
    while (std::getline(ss, tok, ',')) {
        try {
            std::size_t used = 0;
            v.push_back(std::stod(tok, &used));
            if (used != tok.size() && tok.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw Error("not a number: '" + tok + "'");
        }
    }
    return v;
}

/// "tx,ty,tz,qw,qx,qy,qz,jaw" or a JSON file holding a kinematics object.
KinematicState parse_pose(const std::string& s) {
    if (io::fs::exists(s)) return kinematics_from_json(read_json(s));
    const auto v = parse_numbers(s);
    if (v.size() != 8) throw Error("--pose expects 8 comma-separated values: tx,ty,tz,qw,qx,qy,qz,jaw");
    KinematicState p;
    p.translation = {v[0], v[1], v[2]};
    p.rotation = Eigen::Vector4d(v[3], v[4], v[5], v[6]);
    const double n = p.rotation.norm();
    if (!(n > 0)) throw Error("--pose: zero rotation quaternion");
    if (std::abs(n - 1) > 1e-6) std::cerr << "warning: pose quaternion renormalized\n";
    p.rotation /= n;
    p.jaw_angle = v[7];
    return p;
}

/// A JSON camera file, or "manifest.json#frame_id" to borrow a recorded camera.
CameraPose parse_camera(const std::string& s) {
    const auto hash = s.find('#');
    if (hash != std::string::npos) {
        const auto m = io::read_manifest(s.substr(0, hash));
        const std::string id = s.substr(hash + 1);
        for (const auto& f : m.frames)
            if (f.frame_id == id) return f.camera;
        throw Error("no frame '" + id + "' in " + s.substr(0, hash));
    }
    CameraPose c = camera_from_json(read_json(s));
    c.validate();
    return c;
}

void write_run_json(const path& out, const std::string& command, const json& config) {
    const std::string dumped = config.dump();
    char hash[32];
    std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(io::fnv1a(dumped)));
    const json run = {{"command", command},
                      {"config_hash", hash},
                      {"config", config},
                      {"versions", {{"dgs", "0.1.0"}, {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                                                                    std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                                                    std::to_string(EIGEN_MINOR_VERSION)}}}};
    io::write_text(out / "run.json", run.dump(2) + "\n");
}

int cmd_synth(const Globals& g, const std::string& spec_path, const path& out) {
    SyntheticSpec spec = synthetic_spec_from_json(read_json(spec_path));
    if (g.seed_set) spec.seed = g.seed;
    const SyntheticDataset ds = generate_synthetic(spec, g.threads);
    write_synthetic(ds, out);
    write_run_json(out, "synth-dataset", to_json(spec));
    std::cout << "wrote " << ds.split("train").frames.size() << " training frames to " << out << "\n";
    return 0;
}

int cmd_train(const Globals& g, const path& manifest, const std::string& config_path, const path& out,
              int max_iters) {
    TrainConfig cfg = train_config_from_json(read_json(config_path));
    if (g.seed_set) cfg.seed = g.seed;
    cfg.threads = g.threads;
    if (max_iters >= 0) cfg.schedule.max_iters = max_iters;
    auto ds = io::load_dataset(manifest);
    for (const auto& w : ds.warnings) std::cerr << "warning: " << w << "\n";
    Trainer<float> trainer(io::init_scene<float>(ds.points), std::move(ds.frames), ds.manifest.ranges,
                           ds.manifest.curriculum, cfg);
    write_run_json(out, "train", to_json(trainer.config()));
    const int every = std::max(1, cfg.schedule.max_iters / 20);
    trainer.run(out, [&](const StepEvents& ev) {
        const auto& s = trainer.state();
        if (ev.transitioned) std::cout << "iter " << s.iteration << ": entering PhaseTwo\n";
        if (s.iteration % every == 0) {
            const auto& r = trainer.log().back();
            std::printf("iter %d  loss %.5f  psnr %.2f  gaussians %zu  sh %d\n", r.iter, r.loss, r.psnr,
                        r.gaussian_count, r.active_sh_degree);
            std::fflush(stdout);
        }
    });
    return 0;
}

int cmd_render(const Globals& g, const path& ckpt_dir, const std::string& pose, const std::string& camera,
               const path& out) {
    const auto ck = io::load_checkpoint<float>(ckpt_dir);
    const KinematicState p = parse_pose(pose);
    const CameraPose cam = parse_camera(camera);
    const Deltas<float> d = predict_scene_deltas(ck.field, ck.scene, p, ck.ranges);
    io::write_png(out, clamp01(render(ck.scene, cam, &d, RenderOptions{g.threads}).image));
    return 0;
}

int cmd_annotate(const Globals& g, const path& ckpt_dir, const std::string& pose, const std::string& camera,
                 const path& out, std::string frame_id, const std::vector<double>& thresholds, double rgb_threshold) {
    const auto ck = io::load_checkpoint<float>(ckpt_dir);
    const KinematicState p = parse_pose(pose);
    const CameraPose cam = parse_camera(camera);
    DeltaThresholds th = DeltaThresholds::defaults(ck.ranges.scene_extent);
    if (!thresholds.empty()) {
        if (thresholds.size() != 3) throw Error("--thresholds expects h_mu,h_r,h_s");
        th = {thresholds[0], thresholds[1], thresholds[2]};
    }
    const AnnotationOutput a = render_mask(ck.scene, ck.field, p, ck.ranges, cam, th, rgb_threshold, {g.threads});
    io::write_annotation(out, frame_id, a);
    std::cout << (a.detected() ? "instrument detected" : "no detection") << "\n";
    return 0;
}

int cmd_eval(const Globals& g, const path& ckpt_dir, const path& manifest, const path& report) {
    const auto ck = io::load_checkpoint<float>(ckpt_dir);
    const auto ds = io::load_dataset(manifest, false);
    const MetricReport rep = evaluate_frames(ck.scene, ck.field, ck.ranges, ds.frames, g.threads);
    std::string csv = "frame_id,psnr,ssim\n";
    for (const auto& m : rep.per_frame) {
        char buf[160];
        std::snprintf(buf, sizeof buf, ",%.6f,%.6f\n", m.psnr, m.ssim);
        csv += m.frame_id + buf;
    }
    io::write_text(report / "per_frame.csv", csv);
    const auto ps = rep.psnr(), ss = rep.ssim();
    const json agg = {{"frames", rep.per_frame.size()},
                      {"PSNR", {{"mean", ps.mean}, {"std", ps.std}}},
                      {"SSIM", {{"mean", ss.mean}, {"std", ss.std}}},
                      {"LPIPS", nullptr}};
    io::write_text(report / "summary.json", agg.dump(2) + "\n");
    std::printf("PSNR %.3f  SSIM %.4f over %zu frames\n", ps.mean, ss.mean, rep.per_frame.size());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Deformable Gaussian splatting with kinematic deformation and automatic annotation"};
    app.require_subcommand(1);
    Globals g;
    auto* seed_opt = app.add_option("--seed", g.seed, "random seed (overrides the config)");
    app.add_option("--threads", g.threads, "worker threads")->check(CLI::PositiveNumber);
    app.add_option("--config", g.config, "config file (train: used when no positional config is given)");

    std::string a1, a2, a3, pose, camera, frame_id = "frame";
    std::vector<double> thresholds;
    double rgb_threshold = kDefaultRgbThreshold;
    int max_iters = -1;

    auto* synth = app.add_subcommand("synth-dataset", "generate a synthetic dataset");
    synth->add_option("spec", a1, "synthetic spec JSON")->required();
    synth->add_option("out", a2, "output directory")->required();

    auto* train = app.add_subcommand("train", "train a canonical scene and deformation field");
    train->add_option("manifest", a1, "dataset manifest")->required();
    train->add_option("config", a2, "training config JSON");
    train->add_option("out", a3, "run directory");
    train->add_option("--iters", max_iters, "override max_iters");

    auto* rend = app.add_subcommand("render", "render a checkpoint at a kinematic state");
    rend->add_option("checkpoint", a1, "checkpoint directory")->required();
    rend->add_option("out", a2, "output PNG")->required();
    rend->add_option("--pose", pose, "tx,ty,tz,qw,qx,qy,qz,jaw or a JSON file")->required();
    rend->add_option("--camera", camera, "camera JSON or manifest.json#frame_id")->required();

    auto* ann = app.add_subcommand("annotate", "write mask and boxes for a kinematic state");
    ann->add_option("checkpoint", a1, "checkpoint directory")->required();
    ann->add_option("out", a2, "output directory")->required();
    ann->add_option("--pose", pose, "tx,ty,tz,qw,qx,qy,qz,jaw or a JSON file")->required();
    ann->add_option("--camera", camera, "camera JSON or manifest.json#frame_id")->required();
    ann->add_option("--frame-id", frame_id, "frame identifier for output names");
    ann->add_option("--thresholds", thresholds, "h_mu,h_r,h_s")->delimiter(',');
    ann->add_option("--rgb-threshold", rgb_threshold, "mask threshold on the max channel");

    auto* ev = app.add_subcommand("eval", "score a checkpoint against a manifest");
    ev->add_option("checkpoint", a1, "checkpoint directory")->required();
    ev->add_option("manifest", a2, "dataset manifest")->required();
    ev->add_option("report", a3, "report directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        // Unknown subcommands and other usage errors exit with 2.
        std::cerr << "error: " << e.what() << "\n\n" << app.help();
        return 2;
    }
    g.seed_set = seed_opt->count() > 0;

    try {
        if (*synth) return cmd_synth(g, a1, a2);
        if (*train) {
            std::string cfg = a2, out = a3;
            if (out.empty() && !g.config.empty()) out = cfg, cfg = g.config;
            if (cfg.empty() || out.empty()) throw Error("train: expected <manifest> <config> <out>");
            return cmd_train(g, a1, cfg, out, max_iters);
        }
        if (*rend) return cmd_render(g, a1, pose, camera, a2);
        if (*ann) return cmd_annotate(g, a1, pose, camera, a2, frame_id, thresholds, rgb_threshold);
        if (*ev) return cmd_eval(g, a1, a2, a3);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

// plankit command line: plan validation, control encoding, plan edits, the
// reference renderer, and the SCS/EFS analysis reports.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "plankit/audio.hpp"
#include "plankit/control.hpp"
#include "plankit/control_file.hpp"
#include "plankit/edit.hpp"
#include "plankit/edit_json.hpp"
#include "plankit/efs.hpp"
#include "plankit/error.hpp"
#include "plankit/plan.hpp"
#include "plankit/plan_json.hpp"
#include "plankit/scs.hpp"
#include "plankit/synth.hpp"

using nlohmann::json;
using namespace plankit;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitDomain = 1;
constexpr int kExitIo = 2;

// All output files go through a temp-and-rename so a failing run never
// leaves a torn file behind.
template <typename WriteFn>
void atomic_write(const std::string& path, WriteFn&& write) {
    const std::string tmp = path + ".tmp";
    try {
        write(tmp);
        std::filesystem::rename(tmp, path);
    } catch (...) {
        std::error_code ec;
        std::filesystem::remove(tmp, ec);
        throw;
    }
}

struct GlobalFlags {
    double sample_rate = kPipelineSampleRate;
    int hop = 256;
    double beta_max = kBetaMax;
    double alpha = 0.5;
    std::vector<double> weights;
    bool json_output = false;
    std::uint64_t seed = 0;
};

MelParams mel_params_from(const GlobalFlags& g) {
    MelParams p;
    p.hop = g.hop;
    return p;
}

ScsWeights scs_weights_from(const GlobalFlags& g) {
    if (g.weights.empty()) return ScsWeights{};
    if (g.weights.size() != 5) {
        throw DomainError("InvalidArgument", "--weights needs five comma-separated values");
    }
    return ScsWeights{g.weights[0], g.weights[1], g.weights[2], g.weights[3], g.weights[4]};
}

json scs_report_to_json(const ScsReport& r) {
    return json{{"s_beat", r.s_beat},
                {"s_tempo", r.s_tempo},
                {"s_bound", r.s_bound},
                {"s_recur", r.s_recur},
                {"s_coh", r.s_coh},
                {"weights",
                 {{"beat", r.weights.beat},
                  {"tempo", r.weights.tempo},
                  {"bound", r.weights.bound},
                  {"recur", r.weights.recur},
                  {"coh", r.weights.coh}}},
                {"total", r.total},
                {"flags", r.flags}};
}

json efs_report_to_json(const EfsReport& r) {
    json predicates = json::array();
    for (const PredicateResult& p : r.predicates) {
        predicates.push_back(json{{"kind", to_string(p.kind)}, {"passed", p.passed}});
    }
    return json{{"p", r.p},
                {"delta_in", r.delta_in},
                {"delta_out", r.delta_out},
                {"r", r.r},
                {"alpha", r.alpha},
                {"total", r.total},
                {"predicates", predicates},
                {"flags", r.flags}};
}

Meter parse_meter(const std::string& text) {
    const auto slash = text.find('/');
    if (slash == std::string::npos) throw IoError("meter must look like 4/4");
    try {
        return Meter{std::stoi(text.substr(0, slash)), std::stoi(text.substr(slash + 1))};
    } catch (const std::exception&) {
        throw IoError("meter must look like 4/4, got: " + text);
    }
}

int cmd_validate(const std::string& plan_path, const GlobalFlags& g) {
    const StructuralPlan plan = load_plan(plan_path);
    const ValidationResult result = validate_plan(plan, g.beta_max);
    if (g.json_output) {
        json violations = json::array();
        for (const Violation& v : result.violations) {
            violations.push_back(json{{"path", v.path}, {"kind", v.kind}, {"message", v.message}});
        }
        std::cout << json{{"ok", result.ok()}, {"violations", violations}}.dump(2) << "\n";
    } else if (!result.ok()) {
        for (const Violation& v : result.violations) {
            std::cerr << v.kind << " at " << v.path << ": " << v.message << "\n";
        }
    }
    return result.ok() ? kExitOk : kExitDomain;
}

int cmd_encode(const std::string& plan_path, const std::string& out_path, int frames,
               const GlobalFlags& g) {
    const StructuralPlan plan = load_plan(plan_path);
    FrameSpec spec;
    spec.sample_rate = g.sample_rate;
    spec.hop = g.hop;
    if (frames > 0) spec.frame_count = frames;
    const ControlTensor ctrl = encode_controls(plan, spec, g.beta_max);
    atomic_write(out_path, [&](const std::string& tmp) { write_control_file(ctrl, tmp); });
    std::cerr << "wrote " << ctrl.channels << "x" << ctrl.frames << " control tensor to "
              << out_path << "\n";
    return kExitOk;
}

int cmd_tile(const std::string& in_path, const std::string& out_path, int mel_bins) {
    const ControlTensor ctrl = read_control_file(in_path);
    const TiledTensor tiled = tile_controls(ctrl, mel_bins);
    atomic_write(out_path, [&](const std::string& tmp) { write_tiled_file(tiled, tmp); });
    std::cerr << "wrote " << tiled.channels << "x" << tiled.bins << "x" << tiled.frames
              << " tiled tensor to " << out_path << "\n";
    return kExitOk;
}

int cmd_edit(const std::string& plan_path, const std::string& edit_path,
             const std::string& out_path, const GlobalFlags& g) {
    const StructuralPlan plan = load_plan(plan_path);
    const EditSpec spec = load_edit_spec(edit_path);
    const StructuralPlan edited = apply_edit(plan, spec, g.beta_max);
    atomic_write(out_path, [&](const std::string& tmp) { save_plan(edited, tmp); });
    return kExitOk;
}

int cmd_render(const std::string& plan_path, const std::string& out_path,
               const GlobalFlags& g) {
    const StructuralPlan plan = load_plan(plan_path);
    RenderConfig config;
    config.sample_rate = g.sample_rate;
    config.seed = g.seed;
    const AudioBuffer audio = render_plan(plan, config);
    atomic_write(out_path, [&](const std::string& tmp) { write_wav(audio, tmp); });
    return kExitOk;
}

int cmd_click(double bpm, int bars, const std::string& meter_text,
              const std::string& out_path, const GlobalFlags& g) {
    RenderConfig config;
    config.sample_rate = g.sample_rate;
    config.seed = g.seed;
    const AudioBuffer audio = render_click(bpm, bars, parse_meter(meter_text), config);
    atomic_write(out_path, [&](const std::string& tmp) { write_wav(audio, tmp); });
    return kExitOk;
}

int cmd_scs(const std::vector<std::string>& files, const GlobalFlags& g) {
    const ScsWeights weights = scs_weights_from(g);
    std::vector<json> reports(files.size());
    std::vector<std::string> errors(files.size());

#pragma omp parallel for schedule(dynamic, 1)
    for (size_t i = 0; i < files.size(); ++i) {
        try {
            const AudioBuffer audio = load_and_normalize(files[i]);
            json r = scs_report_to_json(scs(audio, weights));
            r["file"] = files[i];
            reports[i] = std::move(r);
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    }

    bool failed = false;
    for (size_t i = 0; i < files.size(); ++i) {
        if (!errors[i].empty()) {
            std::cerr << files[i] << ": " << errors[i] << "\n";
            failed = true;
        }
    }
    if (failed) return kExitDomain;

    if (files.size() == 1) {
        std::cout << reports[0].dump(2) << "\n";
    } else {
        std::cout << json(reports).dump(2) << "\n";
    }
    return kExitOk;
}

int cmd_efs(const std::string& original_path, const std::string& edited_path,
            const std::string& edit_path, const std::string& plan_path,
            const GlobalFlags& g) {
    // No loudness normalization here: EFS compares the two files as given, so
    // gain-identical pairs (e.g. renderer output) keep delta_out exactly 0.
    AudioBuffer original = read_wav(original_path);
    AudioBuffer edited = read_wav(edited_path);
    original = resample(original, g.sample_rate);
    edited = resample(edited, g.sample_rate);

    const EditSpec spec = load_edit_spec(edit_path);
    const StructuralPlan plan = load_plan(plan_path);
    const EfsReport report = efs(original, edited, spec, plan, g.alpha, mel_params_from(g));
    std::cout << efs_report_to_json(report).dump(2) << "\n";
    return kExitOk;
}

int cmd_diff(const std::string& a_path, const std::string& b_path, const GlobalFlags& g) {
    const ControlTensor a = read_control_file(a_path);
    const ControlTensor b = read_control_file(b_path);
    if (a.channels != b.channels || a.frames != b.frames) {
        std::cerr << "shape mismatch: " << a.channels << "x" << a.frames << " vs "
                  << b.channels << "x" << b.frames << "\n";
        return kExitDomain;
    }

    json channels = json::array();
    bool any = false;
    for (int c = 0; c < a.channels; ++c) {
        json ranges = json::array();
        int run_start = -1;
        float max_abs = 0.0f;
        auto flush = [&](int end) {
            if (run_start >= 0) {
                ranges.push_back(json{{"first", run_start}, {"last", end - 1},
                                      {"max_abs_diff", max_abs}});
                run_start = -1;
                max_abs = 0.0f;
            }
        };
        for (int t = 0; t < a.frames; ++t) {
            const float d = std::abs(a.at(c, t) - b.at(c, t));
            if (d > 0.0f) {
                if (run_start < 0) run_start = t;
                max_abs = std::max(max_abs, d);
            } else {
                flush(t);
            }
        }
        flush(a.frames);
        if (!ranges.empty()) {
            any = true;
            channels.push_back(json{{"channel", c}, {"ranges", ranges}});
        }
    }

    if (g.json_output) {
        std::cout << json{{"identical", !any}, {"channels", channels}}.dump(2) << "\n";
    } else if (any) {
        for (const json& ch : channels) {
            for (const json& r : ch["ranges"]) {
                std::cerr << "channel " << ch["channel"] << ": frames " << r["first"] << ".."
                          << r["last"] << " differ (max |diff| = "
                          << r["max_abs_diff"].get<float>() << ")\n";
            }
        }
    } else {
        std::cerr << "files are identical\n";
    }
    return any ? kExitDomain : kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"beat-aligned structural plans: encoding, editing, rendering, scoring"};
    app.require_subcommand(1);

    GlobalFlags g;
    app.add_option("--sr", g.sample_rate, "pipeline sample rate")->capture_default_str();
    app.add_option("--hop", g.hop, "frame hop in samples")->capture_default_str();
    app.add_option("--beta-max", g.beta_max, "tempo ceiling in BPM")->capture_default_str();
    app.add_option("--alpha", g.alpha, "EFS mixing weight")->capture_default_str();
    app.add_option("--weights", g.weights, "five SCS sub-score weights")->delimiter(',');
    app.add_flag("--json", g.json_output, "machine-readable output");
    app.add_option("--seed", g.seed, "noise seed for the renderer");

    std::string plan_path, edit_path, out_path, in_a, in_b;
    int frames = 0, mel_bins = 128, bars = 4;
    double bpm = 120.0;
    std::string meter_text = "4/4";
    std::vector<std::string> scs_files;

    CLI::App* validate = app.add_subcommand("validate", "check a plan file");
    validate->add_option("plan", plan_path, "plan JSON")->required();

    CLI::App* encode = app.add_subcommand("encode", "plan -> control tensor");
    encode->add_option("plan", plan_path, "plan JSON")->required();
    encode->add_option("-o,--output", out_path, "output .wvc path")->required();
    encode->add_option("--frames", frames, "override the frame count");

    CLI::App* tile = app.add_subcommand("tile", "control tensor -> frequency-tiled tensor");
    tile->add_option("input", in_a, "input .wvc path")->required();
    tile->add_option("-o,--output", out_path, "output .wvt path")->required();
    tile->add_option("-F,--mel-bins", mel_bins, "frequency rows per channel")
        ->capture_default_str();

    CLI::App* edit = app.add_subcommand("edit", "apply an edit spec to a plan");
    edit->add_option("plan", plan_path, "plan JSON")->required();
    edit->add_option("edits", edit_path, "edit JSON")->required();
    edit->add_option("-o,--output", out_path, "output plan JSON")->required();

    CLI::App* render = app.add_subcommand("render", "plan -> reference WAV");
    render->add_option("plan", plan_path, "plan JSON")->required();
    render->add_option("-o,--output", out_path, "output WAV path")->required();

    CLI::App* click = app.add_subcommand("click", "metronome WAV");
    click->add_option("--bpm", bpm, "tempo")->capture_default_str();
    click->add_option("--bars", bars, "bar count")->capture_default_str();
    click->add_option("--meter", meter_text, "meter, e.g. 3/4")->capture_default_str();
    click->add_option("-o,--output", out_path, "output WAV path")->required();

    CLI::App* scs_cmd = app.add_subcommand("scs", "structure coherence report");
    scs_cmd->add_option("audio", scs_files, "input WAV file(s)")->required();

    CLI::App* efs_cmd = app.add_subcommand("efs", "edit fidelity report");
    efs_cmd->add_option("original", in_a, "original WAV")->required();
    efs_cmd->add_option("edited", in_b, "edited WAV")->required();
    efs_cmd->add_option("--edit", edit_path, "edit JSON")->required();
    efs_cmd->add_option("--plan", plan_path, "edited plan JSON")->required();

    CLI::App* diff = app.add_subcommand("diff", "compare two control tensor files");
    diff->add_option("a", in_a, "first .wvc")->required();
    diff->add_option("b", in_b, "second .wvc")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitIo;
    }

    try {
        if (validate->parsed()) return cmd_validate(plan_path, g);
        if (encode->parsed()) return cmd_encode(plan_path, out_path, frames, g);
        if (tile->parsed()) return cmd_tile(in_a, out_path, mel_bins);
        if (edit->parsed()) return cmd_edit(plan_path, edit_path, out_path, g);
        if (render->parsed()) return cmd_render(plan_path, out_path, g);
        if (click->parsed()) return cmd_click(bpm, bars, meter_text, out_path, g);
        if (scs_cmd->parsed()) return cmd_scs(scs_files, g);
        if (efs_cmd->parsed()) return cmd_efs(in_a, in_b, edit_path, plan_path, g);
        if (diff->parsed()) return cmd_diff(in_a, in_b, g);
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDomain;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }
    return kExitIo;
}

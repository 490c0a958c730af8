// rehab: offline replay, synthetic simulation, reports, store management and
// the live session server.
//
// Exit codes: 0 ok, 1 usage, 2 malformed input, 3 store error.

#include <rehab/report.hpp>
#include <rehab/scripts.hpp>
#include <rehab/server.hpp>

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

namespace {

using namespace rehab;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInput = 2;
constexpr int kExitStore = 3;

struct Outputs {
    std::string events_path;
    std::string report_path;
    std::string report_jsonl_path;
    std::string store_root = "rehab-sessions";
    bool no_store = false;
};

void write_file(const std::string& path, const std::string& data) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << data;
    if (!out.flush()) throw std::runtime_error("write failed for '" + path + "'");
}

RunConfig config_from(const std::string& path) { return path.empty() ? RunConfig{} : load_config_file(path); }

/// Shared tail of replay and simulate: run the engine, then write the event
/// log, the record and the report.
int run_and_report(FrameSource& source, const RunConfig& cfg, const Outputs& out) {
    SessionRun run;
    try {
        run = run_session(source, cfg.game);
    } catch (const CaptureError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    }
    SessionRecord record = make_record(cfg.game, run.state, run.events, now_us());
    if (!out.events_path.empty()) write_file(out.events_path, event_log(run.events));
    const std::string table = format_report(record);
    if (!out.report_path.empty()) write_file(out.report_path, table);
    if (!out.report_jsonl_path.empty()) write_file(out.report_jsonl_path, report_jsonl(record));
    if (!out.no_store) {
        try {
            SessionStore(out.store_root).save(record);
        } catch (const StoreError& e) {
            std::cerr << "error: " << e.what() << '\n';
            return kExitStore;
        }
        std::cerr << "saved session " << record.session_id << " in " << out.store_root << '\n';
    }
    std::cout << table;
    return kExitOk;
}

void add_outputs(CLI::App* cmd, Outputs& out) {
    cmd->add_option("--events", out.events_path, "Write the event log (JSON lines) here");
    cmd->add_option("--report", out.report_path, "Write the report table here");
    cmd->add_option("--report-jsonl", out.report_jsonl_path, "Write the report as JSON lines here");
    cmd->add_option("--store", out.store_root, "Session store directory")->capture_default_str();
    cmd->add_flag("--no-store", out.no_store, "Do not save the session record");
}

MovementScript load_script(const std::string& choice, const RunConfig& cfg, int reps) {
    if (choice == "perfect") return perfect_player(cfg.game.scene, reps);
    if (choice == "miss") return always_miss_player(cfg.game.scene, cfg.game.dda, reps);
    std::ifstream in(choice);
    if (!in) throw DecodeError("script: '" + choice + "' is neither perfect, miss, nor a readable file");
    try {
        return script_from_json(json::parse(in));
    } catch (const json::exception& e) {
        throw DecodeError("script '" + choice + "': " + e.what());
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Grab-move-drop rehabilitation game engine"};
    app.require_subcommand(1);
    std::string config_path;
    app.add_option("--config", config_path, "JSON configuration overrides")->check(CLI::ExistingFile);

    // replay
    auto* replay = app.add_subcommand("replay", "Run the engine over a recorded frame file");
    std::string replay_input;
    Outputs replay_out;
    replay->add_option("input", replay_input, "Frame file (JSON lines)")->required();
    replay->add_option("--config", config_path, "JSON configuration overrides")->check(CLI::ExistingFile);
    add_outputs(replay, replay_out);

    // simulate
    auto* simulate = app.add_subcommand("simulate", "Generate a synthetic patient session and run it");
    std::string script_spec = "perfect";
    int reps = 30;
    std::uint64_t seed = 1;
    double fps = 30.0;
    std::string frames_out;
    std::optional<double> tremor_amp, tremor_freq, speed_scale;
    Outputs sim_out;
    simulate->add_option("--script", script_spec, "perfect | miss | path to a script JSON file")->capture_default_str();
    simulate->add_option("--reps", reps, "Repetitions for the built-in scripts")->capture_default_str();
    simulate->add_option("--seed", seed, "Noise seed")->capture_default_str();
    simulate->add_option("--fps", fps, "Sampling rate, Hz")->capture_default_str();
    simulate->add_option("--frames-out", frames_out, "Also write the generated frame file here");
    simulate->add_option("--tremor-amp", tremor_amp, "Tremor amplitude, meters");
    simulate->add_option("--tremor-freq", tremor_freq, "Tremor frequency, Hz");
    simulate->add_option("--speed-scale", speed_scale, "Movement speed factor in (0, 1]");
    simulate->add_option("--config", config_path, "JSON configuration overrides")->check(CLI::ExistingFile);
    add_outputs(simulate, sim_out);

    // report
    auto* report = app.add_subcommand("report", "Print the report of a stored session");
    std::string report_target;
    std::string report_store = "rehab-sessions";
    std::string report_jsonl_path;
    report->add_option("session", report_target, "Session id or path to a record file")->required();
    report->add_option("--store", report_store, "Session store directory")->capture_default_str();
    report->add_option("--report-jsonl", report_jsonl_path, "Also write the report as JSON lines here");
    report->add_option("--config", config_path, "JSON configuration overrides")->check(CLI::ExistingFile);

    // store
    auto* store = app.add_subcommand("store", "Manage saved sessions");
    store->require_subcommand(1);
    std::string store_root = "rehab-sessions";
    store->add_option("--store", store_root, "Session store directory")->capture_default_str();
    store->add_option("--config", config_path, "JSON configuration overrides")->check(CLI::ExistingFile);
    auto* store_list = store->add_subcommand("list", "List saved sessions");
    auto* store_delete = store->add_subcommand("delete", "Delete a saved session");
    std::string delete_id;
    store_delete->add_option("id", delete_id, "Session id")->required();
    for (auto* sub : {store_list, store_delete}) {
        sub->add_option("--store", store_root, "Session store directory");
        sub->add_option("--config", config_path, "JSON configuration overrides")->check(CLI::ExistingFile);
    }

    // serve
    auto* serve = app.add_subcommand("serve", "Run the WebSocket session server");
    std::string bind = kDefaultBind;
    std::string serve_store = "rehab-sessions";
    int threads = 2;
    serve->add_option("--bind", bind, "host:port")->capture_default_str();
    serve->add_option("--store", serve_store, "Session store directory")->capture_default_str();
    serve->add_option("--threads", threads, "I/O threads")->capture_default_str();
    serve->add_option("--config", config_path, "JSON configuration overrides")->check(CLI::ExistingFile);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitUsage;
    }

    RunConfig cfg;
    try {
        cfg = config_from(config_path);
    } catch (const DecodeError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    }

    try {
        if (replay->parsed()) {
            std::unique_ptr<FrameSource> source;
            try {
                source = open_replay(replay_input);
            } catch (const CaptureError& e) {
                std::cerr << "error: " << e.what() << '\n';
                return kExitInput;
            }
            return run_and_report(*source, cfg, replay_out);
        }

        if (simulate->parsed()) {
            MovementScript script;
            try {
                script = load_script(script_spec, cfg, reps);
                if (tremor_amp) script.tremor_amplitude = *tremor_amp;
                if (tremor_freq) script.tremor_frequency = *tremor_freq;
                if (speed_scale) script.speed_scale = *speed_scale;
                check(script);
            } catch (const std::exception& e) {
                std::cerr << "error: " << e.what() << '\n';
                return kExitInput;
            }
            std::unique_ptr<FrameSource> gen;
            try {
                gen = generate(script, cfg.noise, seed, fps);
            } catch (const CaptureError& e) {
                std::cerr << "error: " << e.what() << '\n';
                return kExitUsage;
            }
            if (frames_out.empty()) return run_and_report(*gen, cfg, sim_out);
            const auto frames = collect(*gen);
            {
                std::ofstream out(frames_out, std::ios::binary | std::ios::trunc);
                if (!out) throw std::runtime_error("cannot write '" + frames_out + "'");
                write_frames(out, frames);
            }
            VectorSource source(frames);
            return run_and_report(source, cfg, sim_out);
        }

        if (report->parsed()) {
            SessionRecord record;
            try {
                if (std::filesystem::is_regular_file(report_target)) {
                    std::ifstream in(report_target);
                    record = decode_record(in);
                } else {
                    record = SessionStore(report_store).load(report_target);
                }
            } catch (const StoreError& e) {
                std::cerr << "error: " << to_string(e.kind()) << ": " << e.what() << '\n';
                return kExitStore;
            }
            if (!report_jsonl_path.empty()) write_file(report_jsonl_path, report_jsonl(record));
            std::cout << format_report(record);
            return kExitOk;
        }

        if (store->parsed()) {
            SessionStore s(store_root);
            if (store_list->parsed()) {
                for (const auto& summary : s.list()) {
                    std::cout << summary.session_id << '\t' << summary.created_at_us << '\t' << summary.n_drops << '\t'
                              << (summary.hit_rate ? std::to_string(*summary.hit_rate) : "-") << '\n';
                }
                return kExitOk;
            }
            try {
                s.remove(delete_id);
            } catch (const StoreError& e) {
                std::cerr << "error: " << to_string(e.kind()) << ": " << e.what() << '\n';
                return kExitStore;
            }
            std::cout << "deleted " << delete_id << '\n';
            return kExitOk;
        }

        if (serve->parsed()) {
            Server server(bind, cfg, serve_store, threads);
            std::cerr << "serving on " << bind.substr(0, bind.rfind(':')) << ':' << server.port() << ", store "
                      << serve_store << '\n';
            server.run();
            return kExitOk;
        }
    } catch (const ServerError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitStore;
    }
    return kExitUsage;
}

// Command-line surface over the library: dataset generation, distance
// analysis, the randomness battery, and the authentication demos.
//
// Exit codes: 0 success, 1 verification/test failure, 2 usage error.

#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "wpuf/pipeline.hpp"

namespace {

int run_dataset(const wpuf::RunConfig& cfg, const std::vector<std::string>& presets,
                std::size_t n_challenges, std::size_t n_repeats) {
    const auto result = wpuf::cmd_dataset(cfg, presets, n_challenges, n_repeats);
    std::cout << "dataset: " << result.inter_count << " challenges, " << result.intra_count
              << " repeat acquisitions, sigma=" << result.sigma << "\n"
              << "manifest: " << result.manifest_path.string() << "\n";
    return 0;
}

int run_analyze(const std::string& dataset, const std::string& mode) {
    const auto summary = wpuf::cmd_analyze(dataset, mode);
    std::cout << "inter mean (fractional HD): " << summary.inter_mean_frac << "\n"
              << "inter min  (fractional HD): " << summary.inter_min_frac << "\n";
    if (summary.intra_mean_frac > 0.0)
        std::cout << "intra mean (fractional HD): " << summary.intra_mean_frac << "\n"
                  << "intra/inter gap:            " << summary.gap << "\n";
    return 0;
}

int run_randtest(const wpuf::RunConfig& cfg, const std::string& input_file, std::size_t sequences,
                 std::size_t seq_bits, std::size_t challenges_per_seq, int ctw_depth,
                 const std::string& export_path, const std::string& export_format,
                 const std::string& report_path, bool allow_small) {
    std::vector<wpuf::BitVec> seqs;
    if (!input_file.empty()) {
        seqs = wpuf::import_ascii(input_file);
    } else {
        cfg.validate();
        wpuf::PufInstance puf(wpuf::stream_key(cfg.seed, "puf"), cfg.puf_config());
        wpuf::ThetaMatrix theta(wpuf::stream_key(cfg.seed, "theta"), cfg.width, cfg.height);
        wpuf::BchCode code(cfg.bch_m, cfg.bch_t);
        seqs = wpuf::generate_sequences(puf, theta, code, cfg.selection, sequences, seq_bits,
                                        challenges_per_seq, cfg.seed);
    }
    if (!export_path.empty()) {
        wpuf::export_bits(seqs, export_path,
                          export_format == "raw" ? wpuf::BitFormat::Raw : wpuf::BitFormat::Ascii);
        std::cout << "exported " << seqs.size() << " sequences to " << export_path << "\n";
    }
    wpuf::BatteryParams params;
    params.allow_small_battery = allow_small;
    const auto report = wpuf::battery(seqs, params);
    for (const auto& t : report.tests)
        std::printf("%-22s proportion=%.4f uniformity_p=%.4g %s\n", t.name.c_str(), t.proportion,
                    t.uniformity_p, t.pass ? "pass" : "FAIL");
    double ctw = 0.0;
    if (!seqs.empty()) ctw = wpuf::ctw_rate(seqs.front(), ctw_depth);
    std::cout << "ctw rate (first sequence): " << ctw << " bits/byte\n";
    if (!report_path.empty()) {
        auto j = report.to_json();
        j["ctw_rate_first_sequence"] = ctw;
        wpuf::write_text_atomic(report_path, j.dump(2));
        wpuf::write_text_atomic(report_path + ".csv", report.to_csv());
    }
    std::cout << (report.all_pass ? "battery: PASS" : "battery: FAIL") << "\n";
    return report.all_pass ? 0 : 1;
}

int run_auth(std::uint64_t seed, const std::string& scenario_name, const std::string& adversary,
             double noise_ber, const std::string& out_dir) {
    wpuf::Scenario scenario;
    if (scenario_name == "pubkey")
        scenario = wpuf::Scenario::PublicKey;
    else if (scenario_name == "hybrid-device-puf")
        scenario = wpuf::Scenario::HybridDevicePuf;
    else if (scenario_name == "hybrid-bs-puf")
        scenario = wpuf::Scenario::HybridBsPuf;
    else
        throw CLI::ValidationError("--scenario", "unknown scenario " + scenario_name);

    wpuf::AuthParams params;
    if (noise_ber > 0.0) {
        // calibrate the simulated acquisition noise to the requested intra BER
        wpuf::PufConfig probe_cfg;
        probe_cfg.width = params.width;
        probe_cfg.height = params.height;
        probe_cfg.slm_pixels = params.slm_pixels;
        probe_cfg.grain_target = params.grain;
        wpuf::PufInstance probe(wpuf::stream_key(seed, "noise-probe"), probe_cfg);
        wpuf::ThetaMatrix theta(params.theta_seed, params.width, params.height);
        wpuf::CalibrationSetup setup;
        setup.theta = &theta;
        setup.challenge = wpuf::SlmChallenge::all_on(static_cast<std::size_t>(params.slm_pixels));
        setup.selection = wpuf::seeded_selection(1, params.width, params.height, params.key_bits);
        params.noise_sigma = wpuf::calibrate_noise(probe, noise_ber, setup);
        std::cout << "calibrated sigma: " << params.noise_sigma << "\n";
    }

    wpuf::AuthSim sim(seed, scenario, params);
    sim.enroll_device("device-0");
    wpuf::Transcript tr;
    bool expect_accept = true;
    if (adversary == "none" || adversary.empty()) {
        tr = sim.run_honest("device-0");
    } else {
        expect_accept = false;
        tr = sim.run_adversary("device-0", seed ^ 0xadu);
    }

    std::cout << (tr.accepted ? "outcome: ACCEPT" : "outcome: REJECT") << "\n";
    if (!tr.accepted) std::cout << "reason: " << tr.reject_reason << "\n";
    std::cout << "storage:\n";
    for (const auto& row : sim.storage_report())
        std::printf("  %-16s puf=%zu secure_hw=%zu public=%zu\n", row.party.c_str(),
                    row.puf_modules, row.secure_hw_keys, row.public_items);
    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        wpuf::write_text_atomic(std::filesystem::path(out_dir) / "transcript.json",
                                tr.to_json().dump(2));
        std::cout << "transcript: " << (std::filesystem::path(out_dir) / "transcript.json").string()
                  << "\n";
    }
    return tr.accepted == expect_accept ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"waveguide-PUF speckle pipeline"};
    app.require_subcommand(1);

    wpuf::RunConfig cfg;
    std::uint64_t seed = 1;
    app.add_option("--seed", seed, "root seed for all substreams")->capture_default_str();

    auto add_common = [&cfg](CLI::App* sub) {
        sub->add_option("--width", cfg.width, "image width")->capture_default_str();
        sub->add_option("--height", cfg.height, "image height")->capture_default_str();
        sub->add_option("--k", cfg.key_bits, "response bit length")->capture_default_str();
        sub->add_option("--bch-m", cfg.bch_m, "BCH field degree")->capture_default_str();
        sub->add_option("--bch-t", cfg.bch_t, "BCH correction capability")->capture_default_str();
        sub->add_option("--selection", cfg.selection, "fixed|seeded|mdc")->capture_default_str();
        sub->add_option("--noise-ber", cfg.noise_ber, "target intra bit-error rate")
            ->capture_default_str();
        sub->add_option("--grain", cfg.grain, "mean speckle size target, pixels")
            ->capture_default_str();
    };

    // dataset
    auto* ds = app.add_subcommand("dataset", "generate challenge-response sets");
    add_common(ds);
    std::vector<std::string> presets;
    std::size_t n_challenges = 0, n_repeats = 60;
    ds->add_option("--preset", presets, "challenge preset(s): adjacent-3x3 spread-a spread-b");
    ds->add_option("--n-challenges", n_challenges, "cap on challenge count (0 = preset size)");
    ds->add_option("--n-repeats", n_repeats, "repeat acquisitions for the intra set")
        ->capture_default_str();
    ds->add_option("--out", cfg.out_dir, "output directory")->capture_default_str();

    // analyze
    auto* an = app.add_subcommand("analyze", "distance distributions and prediction curves");
    std::string dataset_dir, mode;
    an->add_option("--dataset", dataset_dir, "dataset directory")->required();
    an->add_option("--mode", mode, "re-hash with this selection mode (fixed|seeded|mdc)");

    // randtest
    auto* rt = app.add_subcommand("randtest", "run the native randomness battery");
    add_common(rt);
    std::string input_file, export_path, export_format = "ascii", report_path;
    std::size_t sequences = 100, seq_bits = 1000000, challenges_per_seq = 100;
    bool allow_small = false;
    rt->add_option("--file", input_file, "analyze an existing ascii bit file instead");
    rt->add_option("--sequences", sequences, "number of sequences")->capture_default_str();
    rt->add_option("--seq-bits", seq_bits, "bits per sequence")->capture_default_str();
    rt->add_option("--challenges-per-seq", challenges_per_seq,
                   "challenges contributing to each sequence")
        ->capture_default_str();
    int ctw_depth = 8;
    rt->add_option("--ctw-depth", ctw_depth, "context tree depth")->capture_default_str();
    rt->add_option("--export", export_path, "also export sequences for external suites");
    rt->add_option("--export-format", export_format, "ascii|raw")->capture_default_str();
    rt->add_option("--report", report_path, "write the battery report JSON here");
    rt->add_flag("--allow-small", allow_small, "waive the 55-sequence minimum");

    // auth
    auto* au = app.add_subcommand("auth", "run an authentication scenario");
    std::string scenario = "pubkey", adversary = "none", auth_out;
    double auth_noise = 0.0;
    au->add_option("--scenario", scenario, "pubkey|hybrid-device-puf|hybrid-bs-puf")
        ->capture_default_str();
    au->add_option("--adversary", adversary, "none|replay|tamper|impersonate")
        ->capture_default_str();
    au->add_option("--noise-ber", auth_noise, "calibrated intra BER during acquisitions")
        ->capture_default_str();
    au->add_option("--out", auth_out, "directory for the transcript");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    cfg.seed = seed;
    try {
        if (ds->parsed()) return run_dataset(cfg, presets, n_challenges, n_repeats);
        if (an->parsed()) return run_analyze(dataset_dir, mode);
        if (rt->parsed())
            return run_randtest(cfg, input_file, sequences, seq_bits, challenges_per_seq,
                                ctw_depth, export_path, export_format, report_path, allow_small);
        if (au->parsed()) return run_auth(seed, scenario, adversary, auth_noise, auth_out);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "wpuf/auth.hpp"
#include "wpuf/bch.hpp"
#include "wpuf/bitio.hpp"
#include "wpuf/bitvec.hpp"
#include "wpuf/challenge.hpp"
#include "wpuf/ctw.hpp"
#include "wpuf/fuzzy.hpp"
#include "wpuf/hashing.hpp"
#include "wpuf/image.hpp"
#include "wpuf/metrics.hpp"
#include "wpuf/nist.hpp"
#include "wpuf/speckle.hpp"

namespace wpuf {

// Dataset / analysis plumbing shared by the CLI and the test suites. All
// randomness flows from one root seed through labeled substreams, so any
// output is re-derivable from the manifest alone.

struct RunConfig {
    std::uint64_t seed = 1;
    int width = 256;
    int height = 256;
    int slm_pixels = 81;
    std::size_t key_bits = 256;
    int bch_m = 8;
    int bch_t = 3;
    std::string selection = "mdc";  // fixed | seeded | mdc
    double noise_ber = 0.0;         // target intra bit-error rate; 0 = noiseless
    double grain = 3.2;
    std::string out_dir = "out";

    PufConfig puf_config() const {
        PufConfig cfg;
        cfg.width = width;
        cfg.height = height;
        cfg.slm_pixels = slm_pixels;
        cfg.grain_target = grain;
        return cfg;
    }

    void validate() const {
        puf_config().validate();
        if (key_bits < 2 || key_bits > static_cast<std::size_t>(width) * height)
            throw std::invalid_argument("RunConfig: key_bits out of range");
        if (selection != "fixed" && selection != "seeded" && selection != "mdc")
            throw std::invalid_argument("RunConfig: selection must be fixed|seeded|mdc");
        if (noise_ber < 0.0 || noise_ber >= 0.5)
            throw std::invalid_argument("RunConfig: noise_ber out of range");
        BchCode probe(bch_m, bch_t);  // throws on a bad (m, t) pair
        (void)probe;
    }

    nlohmann::json to_json() const {
        return nlohmann::json{{"seed", seed},       {"width", width},
                              {"height", height},   {"slm_pixels", slm_pixels},
                              {"key_bits", key_bits}, {"bch_m", bch_m},
                              {"bch_t", bch_t},     {"selection", selection},
                              {"noise_ber", noise_ber}, {"grain", grain}};
    }

    static RunConfig from_json(const nlohmann::json& j) {
        RunConfig c;
        c.seed = j.at("seed").get<std::uint64_t>();
        c.width = j.at("width").get<int>();
        c.height = j.at("height").get<int>();
        c.slm_pixels = j.at("slm_pixels").get<int>();
        c.key_bits = j.at("key_bits").get<std::size_t>();
        c.bch_m = j.at("bch_m").get<int>();
        c.bch_t = j.at("bch_t").get<int>();
        c.selection = j.at("selection").get<std::string>();
        c.noise_ber = j.at("noise_ber").get<double>();
        c.grain = j.at("grain").get<double>();
        return c;
    }
};

/// The three 9-pixel SLM groups used as challenge presets on the 9x9 grid:
/// one block of adjacent pixels (worst-case spatial overlap) and two groups
/// with wide spacing.
inline std::vector<std::size_t> preset_pixels(const std::string& name) {
    if (name == "adjacent-3x3") return {0, 1, 2, 9, 10, 11, 18, 19, 20};
    if (name == "spread-a") return {4, 6, 8, 31, 33, 35, 58, 60, 62};
    if (name == "spread-b") return {36, 38, 41, 54, 56, 59, 72, 74, 77};
    throw std::invalid_argument("unknown preset: " + name);
}

inline const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> names{"adjacent-3x3", "spread-a", "spread-b"};
    return names;
}

/// All 2^9 on/off combinations of a preset group.
inline std::vector<SlmChallenge> preset_challenges(const std::string& name,
                                                   std::size_t slm_pixels) {
    const auto group = preset_pixels(name);
    std::vector<SlmChallenge> out;
    out.reserve(std::size_t{1} << group.size());
    for (std::size_t mask = 0; mask < (std::size_t{1} << group.size()); ++mask) {
        SlmChallenge c(slm_pixels);
        for (std::size_t b = 0; b < group.size(); ++b)
            if ((mask >> b) & 1) c.bits.set(group[b], true);
        out.push_back(std::move(c));
    }
    return out;
}

inline void write_text_atomic(const std::filesystem::path& path, const std::string& content) {
    const auto tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw std::runtime_error("cannot open " + tmp);
        out << content;
        if (!out) throw std::runtime_error("write failed for " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

/// Per-challenge pixel selection under the configured policy.
class SelectionPolicy {
  public:
    SelectionPolicy(const RunConfig& cfg, const BchCode& code) : cfg_(cfg), code_(&code) {
        if (cfg.selection == "fixed")
            fixed_ = seeded_selection(stream_key(cfg.seed, "fixed-selection"), cfg.width,
                                      cfg.height, cfg.key_bits);
    }

    PixelSelection select(const SlmChallenge& challenge, std::size_t index) const {
        if (cfg_.selection == "fixed") return fixed_;
        if (cfg_.selection == "seeded")
            return seeded_selection(stream_key(cfg_.seed, "seeded-selection", index), cfg_.width,
                                    cfg_.height, cfg_.key_bits);
        return mdc_selection(challenge, *code_, cfg_.width, cfg_.height, cfg_.key_bits);
    }

  private:
    RunConfig cfg_;
    const BchCode* code_;
    PixelSelection fixed_;
};

struct DatasetResult {
    std::filesystem::path manifest_path;
    std::size_t inter_count = 0;
    std::size_t intra_count = 0;
    double sigma = 0.0;
};

/// Generate the inter set (distinct challenges) and intra set (repeat
/// acquisitions of the first challenge), write PGMs, hashed bit strings and
/// a manifest that pins the full configuration.
inline DatasetResult cmd_dataset(const RunConfig& cfg, const std::vector<std::string>& presets,
                                 std::size_t n_challenges, std::size_t n_repeats) {
    cfg.validate();
    const std::filesystem::path dir(cfg.out_dir);
    std::filesystem::create_directories(dir / "inter");
    std::filesystem::create_directories(dir / "intra");

    PufInstance puf(stream_key(cfg.seed, "puf"), cfg.puf_config());
    ThetaMatrix theta(stream_key(cfg.seed, "theta"), cfg.width, cfg.height);
    BchCode code(cfg.bch_m, cfg.bch_t);
    SelectionPolicy policy(cfg, code);

    std::vector<SlmChallenge> challenges;
    if (!presets.empty()) {
        for (const auto& p : presets)
            for (auto& c : preset_challenges(p, static_cast<std::size_t>(cfg.slm_pixels)))
                challenges.push_back(std::move(c));
    } else {
        Rng rng(stream_key(cfg.seed, "challenges"));
        const std::size_t want = n_challenges ? n_challenges : 128;
        for (std::size_t i = 0; i < want; ++i)
            challenges.push_back(SlmChallenge::random(static_cast<std::size_t>(cfg.slm_pixels), rng));
    }
    if (n_challenges && challenges.size() > n_challenges) challenges.resize(n_challenges);

    double sigma = 0.0;
    if (cfg.noise_ber > 0.0) {
        CalibrationSetup setup;
        setup.theta = &theta;
        setup.challenge = SlmChallenge::all_on(static_cast<std::size_t>(cfg.slm_pixels));
        setup.selection = policy.select(setup.challenge, 0);
        sigma = calibrate_noise(puf, cfg.noise_ber, setup);
    }

    nlohmann::json manifest;
    manifest["config"] = cfg.to_json();
    manifest["presets"] = presets;
    manifest["sigma"] = sigma;
    manifest["inter"] = nlohmann::json::array();

    std::string inter_bits;
    for (std::size_t i = 0; i < challenges.size(); ++i) {
        const auto img = puf.respond(challenges[i], stream_key(cfg.seed, "noise", i), sigma);
        char name[32];
        std::snprintf(name, sizeof name, "img_%05zu.pgm", i);
        write_pgm(img, dir / "inter" / name);
        const BitVec bits = hash_image(img, theta, policy.select(challenges[i], i));
        inter_bits += bits.to_string();
        inter_bits += '\n';
        manifest["inter"].push_back({{"challenge", challenges[i].bits.to_hex()},
                                     {"bits", challenges[i].size()},
                                     {"image", std::string("inter/") + name}});
    }
    write_text_atomic(dir / "inter_responses.txt", inter_bits);

    // intra: repeat acquisitions of the first challenge
    manifest["intra"] = nlohmann::json::array();
    std::string intra_bits;
    const SlmChallenge& intra_ch = challenges.front();
    const auto intra_sel = policy.select(intra_ch, 0);
    for (std::size_t a = 0; a < n_repeats; ++a) {
        const auto img = puf.respond(intra_ch, stream_key(cfg.seed, "intra-noise", a), sigma);
        char name[32];
        std::snprintf(name, sizeof name, "img_%05zu.pgm", a);
        write_pgm(img, dir / "intra" / name);
        intra_bits += hash_image(img, theta, intra_sel).to_string();
        intra_bits += '\n';
        manifest["intra"].push_back(std::string("intra/") + name);
    }
    write_text_atomic(dir / "intra_responses.txt", intra_bits);
    write_text_atomic(dir / "manifest.json", manifest.dump(2));

    return DatasetResult{dir / "manifest.json", challenges.size(), n_repeats, sigma};
}

struct AnalysisSummary {
    double inter_mean_frac = 0.0;
    double inter_min_frac = 1.0;
    double intra_mean_frac = 0.0;
    double euclid_inter_mean = 0.0;
    double euclid_intra_mean = 0.0;
    double gap = 0.0;
    double normality_pvalue = 0.0;
};

namespace detail {
inline std::string stats_csv(const DistanceStats& s) {
    std::string csv = "bin_low,bin_high,count\n";
    for (std::size_t i = 0; i < s.bin_counts.size(); ++i)
        csv += std::to_string(s.bin_edges[i]) + "," + std::to_string(s.bin_edges[i + 1]) + "," +
               std::to_string(s.bin_counts[i]) + "\n";
    return csv;
}
}  // namespace detail

/// Reload a dataset and redo the distance analysis, optionally re-hashing the
/// stored images under a different selection policy. Emits histogram CSVs
/// and a summary JSON.
inline AnalysisSummary cmd_analyze(const std::filesystem::path& dataset_dir,
                                   const std::string& mode) {
    const auto manifest_path = dataset_dir / "manifest.json";
    if (!std::filesystem::exists(manifest_path))
        throw std::invalid_argument("cmd_analyze: missing dataset manifest at " +
                                    manifest_path.string());
    std::ifstream in(manifest_path);
    nlohmann::json manifest;
    in >> manifest;
    RunConfig cfg = RunConfig::from_json(manifest.at("config"));
    if (!mode.empty()) cfg.selection = mode;
    cfg.validate();

    ThetaMatrix theta(stream_key(cfg.seed, "theta"), cfg.width, cfg.height);
    BchCode code(cfg.bch_m, cfg.bch_t);
    SelectionPolicy policy(cfg, code);

    std::vector<SpeckleImage> images;
    std::vector<BitVec> bits;
    std::size_t index = 0;
    for (const auto& entry : manifest.at("inter")) {
        const SpeckleImage img = read_pgm(dataset_dir / entry.at("image").get<std::string>());
        const SlmChallenge ch(BitVec::from_hex(entry.at("challenge").get<std::string>(),
                                               entry.at("bits").get<std::size_t>()));
        bits.push_back(hash_image(img, theta, policy.select(ch, index)));
        images.push_back(std::move(img));
        ++index;
    }
    if (images.empty()) throw std::invalid_argument("cmd_analyze: empty dataset");

    std::vector<double> inter_frac, inter_euclid;
    std::vector<std::size_t> inter_hd;
    for (std::size_t i = 0; i < bits.size(); ++i)
        for (std::size_t j = i + 1; j < bits.size(); ++j) {
            inter_hd.push_back(hamming(bits[i], bits[j]));
            inter_frac.push_back(static_cast<double>(inter_hd.back()) /
                                 static_cast<double>(cfg.key_bits));
            inter_euclid.push_back(euclidean(images[i], images[j]));
        }

    std::vector<double> intra_frac, intra_euclid;
    {
        std::vector<SpeckleImage> intra_imgs;
        for (const auto& name : manifest.at("intra"))
            intra_imgs.push_back(read_pgm(dataset_dir / name.get<std::string>()));
        std::vector<BitVec> intra_bits;
        if (!intra_imgs.empty()) {
            const auto first =
                manifest.at("inter").at(0);
            const SlmChallenge ch(BitVec::from_hex(first.at("challenge").get<std::string>(),
                                                   first.at("bits").get<std::size_t>()));
            const auto sel = policy.select(ch, 0);
            for (const auto& img : intra_imgs) intra_bits.push_back(hash_image(img, theta, sel));
            for (std::size_t i = 0; i < intra_bits.size(); ++i)
                for (std::size_t j = i + 1; j < intra_bits.size(); ++j) {
                    intra_frac.push_back(fractional_hamming(intra_bits[i], intra_bits[j]));
                    intra_euclid.push_back(euclidean(intra_imgs[i], intra_imgs[j]));
                }
        }
    }

    AnalysisSummary s;
    const DistanceStats inter_stats = dist_stats(inter_frac);
    s.inter_mean_frac = inter_stats.mean;
    s.inter_min_frac = inter_stats.min;
    s.normality_pvalue = normality_p(inter_frac);
    const DistanceStats euclid_inter = dist_stats(inter_euclid);
    s.euclid_inter_mean = euclid_inter.mean;
    write_text_atomic(dataset_dir / ("hamming_inter_" + cfg.selection + ".csv"),
                      detail::stats_csv(inter_stats));
    write_text_atomic(dataset_dir / "euclidean_inter.csv", detail::stats_csv(euclid_inter));

    nlohmann::json summary;
    summary["selection"] = cfg.selection;
    summary["inter_mean_frac"] = s.inter_mean_frac;
    summary["inter_min_frac"] = s.inter_min_frac;
    summary["inter_normality_p"] = s.normality_pvalue;
    summary["euclid_inter_mean"] = s.euclid_inter_mean;

    if (!intra_frac.empty()) {
        const DistanceStats intra_stats = dist_stats(intra_frac);
        s.intra_mean_frac = intra_stats.mean;
        const DistanceStats euclid_intra = dist_stats(intra_euclid);
        s.euclid_intra_mean = euclid_intra.mean;
        s.gap = overlap_report(intra_stats, inter_stats).gap;
        write_text_atomic(dataset_dir / ("hamming_intra_" + cfg.selection + ".csv"),
                          detail::stats_csv(intra_stats));
        write_text_atomic(dataset_dir / "euclidean_intra.csv", detail::stats_csv(euclid_intra));
        summary["intra_mean_frac"] = s.intra_mean_frac;
        summary["euclid_intra_mean"] = s.euclid_intra_mean;
        summary["gap"] = s.gap;
    }

    // prediction-probability sweep over the ECC family (Fig. 4b shape)
    {
        std::vector<std::unique_ptr<BchCode>> family;
        std::vector<const BchCode*> ptrs;
        std::string csv = "ecc_bits,tau,p_emp,p_gauss\n";
        for (int t = 0; t <= 12; ++t) {
            family.push_back(std::make_unique<BchCode>(cfg.bch_m, t));
            ptrs.push_back(family.back().get());
        }
        for (const auto& pt : prediction_curve(inter_hd, cfg.key_bits, ptrs))
            csv += std::to_string(pt.ecc_bits) + "," + std::to_string(pt.tau) + "," +
                   std::to_string(pt.p_emp) + "," + std::to_string(pt.p_gauss) + "\n";
        write_text_atomic(dataset_dir / ("prediction_" + cfg.selection + ".csv"), csv);
    }

    write_text_atomic(dataset_dir / ("summary_" + cfg.selection + ".json"), summary.dump(2));
    return s;
}

/// Bit sequences from the PUF pipeline for the randomness battery. Under mdc
/// each challenge contributes several extraction windows of its public index
/// stream; under fixed one constant selection hashes every response once.
inline std::vector<BitVec> generate_sequences(const PufInstance& puf, const ThetaMatrix& theta,
                                              const BchCode& code, const std::string& mode,
                                              std::size_t n_sequences, std::size_t bits_per_seq,
                                              std::size_t challenges_per_seq, std::uint64_t seed) {
    const std::size_t key_bits = 256;
    std::vector<BitVec> out;
    out.reserve(n_sequences);
    Rng rng(stream_key(seed, "seqgen"));
    const auto slm = static_cast<std::size_t>(puf.config().slm_pixels);
    PixelSelection fixed;
    if (mode == "fixed")
        fixed = seeded_selection(stream_key(seed, "fixed-selection"), puf.config().width,
                                 puf.config().height, key_bits);
    for (std::size_t s = 0; s < n_sequences; ++s) {
        BitVec seq(bits_per_seq);
        std::size_t at = 0;
        while (at < bits_per_seq) {
            const SlmChallenge ch = SlmChallenge::random(slm, rng);
            const SpeckleImage img = puf.respond(ch, rng.next(), puf.config().noise_sigma);
            const HashedImage hashed(img, theta);
            if (mode == "mdc") {
                const std::size_t extractions =
                    (bits_per_seq + challenges_per_seq * key_bits - 1) /
                    (challenges_per_seq * key_bits);
                MdcIndexStream stream(ch, code, puf.config().width, puf.config().height);
                for (std::size_t e = 0; e < extractions && at < bits_per_seq; ++e) {
                    const BitVec bits = hashed.extract(stream.next_selection(key_bits));
                    for (std::size_t i = 0; i < bits.size() && at < bits_per_seq; ++i)
                        seq.set(at++, bits.get(i));
                }
            } else {
                const BitVec bits = hashed.extract(fixed);
                for (std::size_t i = 0; i < bits.size() && at < bits_per_seq; ++i)
                    seq.set(at++, bits.get(i));
            }
        }
        out.push_back(std::move(seq));
    }
    return out;
}

}  // namespace wpuf

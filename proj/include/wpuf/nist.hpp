#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "wpuf/bitvec.hpp"
#include "wpuf/fft.hpp"
#include "wpuf/stats.hpp"

namespace wpuf {

// SP800-22 statistical tests, the subset whose verdicts the pipeline is
// judged against natively. Template/universal/excursion-style tests are left
// to the external suites via bit export.

inline double nist_monobit(const BitVec& seq) {
    const auto n = static_cast<double>(seq.size());
    if (seq.size() < 2) throw std::invalid_argument("monobit: sequence too short");
    const double s = 2.0 * static_cast<double>(seq.count_ones()) - n;
    return std::erfc(std::abs(s) / std::sqrt(n) / std::numbers::sqrt2);
}

inline double nist_block_frequency(const BitVec& seq, std::size_t block_len = 128) {
    if (block_len < 2) throw std::invalid_argument("block_frequency: invalid block length");
    const std::size_t blocks = seq.size() / block_len;
    if (blocks < 1) throw std::invalid_argument("block_frequency: sequence too short");
    double chi = 0.0;
    for (std::size_t b = 0; b < blocks; ++b) {
        std::size_t ones = 0;
        for (std::size_t i = 0; i < block_len; ++i)
            if (seq.get(b * block_len + i)) ++ones;
        const double pi = static_cast<double>(ones) / static_cast<double>(block_len);
        chi += (pi - 0.5) * (pi - 0.5);
    }
    chi *= 4.0 * static_cast<double>(block_len);
    return igamc(static_cast<double>(blocks) / 2.0, chi / 2.0);
}

inline double nist_runs(const BitVec& seq) {
    const std::size_t n = seq.size();
    if (n < 2) throw std::invalid_argument("runs: sequence too short");
    const double pi = static_cast<double>(seq.count_ones()) / static_cast<double>(n);
    if (std::abs(pi - 0.5) >= 2.0 / std::sqrt(static_cast<double>(n))) return 0.0;
    std::size_t v = 1;
    for (std::size_t i = 1; i < n; ++i)
        if (seq.get(i) != seq.get(i - 1)) ++v;
    const double nn = static_cast<double>(n);
    return std::erfc(std::abs(static_cast<double>(v) - 2.0 * nn * pi * (1.0 - pi)) /
                     (2.0 * std::sqrt(2.0 * nn) * pi * (1.0 - pi)));
}

inline double nist_longest_run(const BitVec& seq) {
    const std::size_t n = seq.size();
    if (n < 128) throw std::invalid_argument("longest_run: sequence too short");
    std::size_t block_len;
    std::vector<int> cats;
    std::vector<double> probs;
    if (n < 6272) {
        block_len = 8;
        cats = {1, 2, 3, 4};
        probs = {0.2148, 0.3672, 0.2305, 0.1875};
    } else if (n < 750000) {
        block_len = 128;
        cats = {4, 5, 6, 7, 8, 9};
        probs = {0.1174, 0.2430, 0.2493, 0.1752, 0.1027, 0.1124};
    } else {
        block_len = 10000;
        cats = {10, 11, 12, 13, 14, 15, 16};
        probs = {0.0882, 0.2092, 0.2483, 0.1933, 0.1208, 0.0675, 0.0727};
    }
    const std::size_t blocks = n / block_len;
    std::vector<std::size_t> v(cats.size(), 0);
    for (std::size_t b = 0; b < blocks; ++b) {
        int longest = 0, run = 0;
        for (std::size_t i = 0; i < block_len; ++i) {
            run = seq.get(b * block_len + i) ? run + 1 : 0;
            longest = std::max(longest, run);
        }
        std::size_t idx;
        if (longest <= cats.front())
            idx = 0;
        else if (longest >= cats.back())
            idx = cats.size() - 1;
        else
            idx = static_cast<std::size_t>(longest - cats.front());
        ++v[idx];
    }
    double chi = 0.0;
    for (std::size_t i = 0; i < cats.size(); ++i) {
        const double expected = static_cast<double>(blocks) * probs[i];
        chi += (static_cast<double>(v[i]) - expected) * (static_cast<double>(v[i]) - expected) / expected;
    }
    return igamc(static_cast<double>(cats.size() - 1) / 2.0, chi / 2.0);
}

/// Forward and backward cumulative-sums p-values.
inline std::pair<double, double> nist_cumulative_sums(const BitVec& seq) {
    const std::size_t n = seq.size();
    if (n < 2) throw std::invalid_argument("cumulative_sums: sequence too short");
    auto one_direction = [&](bool reverse) {
        long long s = 0, zmax = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t at = reverse ? n - 1 - i : i;
            s += seq.get(at) ? 1 : -1;
            zmax = std::max(zmax, std::llabs(s));
        }
        const double z = static_cast<double>(zmax);
        const double nn = static_cast<double>(n);
        const double sq = std::sqrt(nn);
        double sum1 = 0.0;
        for (long long k = static_cast<long long>(std::floor((-nn / z + 1.0) / 4.0));
             k <= static_cast<long long>(std::floor((nn / z - 1.0) / 4.0)); ++k) {
            sum1 += normal_cdf((4.0 * static_cast<double>(k) + 1.0) * z / sq);
            sum1 -= normal_cdf((4.0 * static_cast<double>(k) - 1.0) * z / sq);
        }
        double sum2 = 0.0;
        for (long long k = static_cast<long long>(std::floor((-nn / z - 3.0) / 4.0));
             k <= static_cast<long long>(std::floor((nn / z - 1.0) / 4.0)); ++k) {
            sum2 += normal_cdf((4.0 * static_cast<double>(k) + 3.0) * z / sq);
            sum2 -= normal_cdf((4.0 * static_cast<double>(k) + 1.0) * z / sq);
        }
        return 1.0 - sum1 + sum2;
    };
    return {one_direction(false), one_direction(true)};
}

inline double nist_dft(const BitVec& seq) {
    const std::size_t n = seq.size();
    if (n < 64) throw std::invalid_argument("dft_spectral: sequence too short");
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = seq.get(i) ? 1.0 : -1.0;
    const auto spectrum = fft_r2c(x);
    const double threshold = std::sqrt(std::log(1.0 / 0.05) * static_cast<double>(n));
    const std::size_t half = n / 2;
    std::size_t below = 0;
    for (std::size_t i = 0; i < half; ++i)
        if (std::abs(spectrum[i]) < threshold) ++below;
    const double n0 = 0.95 * static_cast<double>(n) / 2.0;
    const double d = (static_cast<double>(below) - n0) /
                     std::sqrt(static_cast<double>(n) * 0.95 * 0.05 / 4.0);
    return std::erfc(std::abs(d) / std::numbers::sqrt2);
}

/// Serial test, both p-values.
inline std::pair<double, double> nist_serial(const BitVec& seq, int m = 16) {
    const std::size_t n = seq.size();
    if (m < 2 || m > 24) throw std::invalid_argument("serial: invalid block length");
    if (n < (std::size_t{1} << (m + 2))) throw std::invalid_argument("serial: sequence too short");
    auto psi2 = [&](int mm) -> double {
        if (mm <= 0) return 0.0;
        std::vector<std::uint32_t> counts(std::size_t{1} << mm, 0);
        const std::uint32_t mask = (std::uint32_t{1} << mm) - 1;
        std::uint32_t window = 0;
        for (std::size_t i = 0; i + 1 < static_cast<std::size_t>(mm); ++i)
            window = (window << 1) | (seq.get(i) ? 1u : 0u);
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t at = (i + static_cast<std::size_t>(mm) - 1) % n;
            window = ((window << 1) | (seq.get(at) ? 1u : 0u)) & mask;
            ++counts[window];
        }
        double s = 0.0;
        for (auto c : counts) s += static_cast<double>(c) * static_cast<double>(c);
        return s * static_cast<double>(std::size_t{1} << mm) / static_cast<double>(n) -
               static_cast<double>(n);
    };
    const double pm = psi2(m), pm1 = psi2(m - 1), pm2 = psi2(m - 2);
    const double d1 = pm - pm1;
    const double d2 = pm - 2.0 * pm1 + pm2;
    return {igamc(std::pow(2.0, m - 2), d1 / 2.0), igamc(std::pow(2.0, m - 3), d2 / 2.0)};
}

inline double nist_approximate_entropy(const BitVec& seq, int m = 10) {
    const std::size_t n = seq.size();
    if (m < 1 || m > 24) throw std::invalid_argument("approximate_entropy: invalid block length");
    if (n < (std::size_t{1} << (m + 1)))
        throw std::invalid_argument("approximate_entropy: sequence too short");
    auto phi = [&](int mm) -> double {
        std::vector<std::uint32_t> counts(std::size_t{1} << mm, 0);
        const std::uint32_t mask = (std::uint32_t{1} << mm) - 1;
        std::uint32_t window = 0;
        for (std::size_t i = 0; i + 1 < static_cast<std::size_t>(mm); ++i)
            window = (window << 1) | (seq.get(i) ? 1u : 0u);
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t at = (i + static_cast<std::size_t>(mm) - 1) % n;
            window = ((window << 1) | (seq.get(at) ? 1u : 0u)) & mask;
            ++counts[window];
        }
        double s = 0.0;
        for (auto c : counts) {
            if (c == 0) continue;
            const double f = static_cast<double>(c) / static_cast<double>(n);
            s += f * std::log(f);
        }
        return s;
    };
    const double apen = phi(m) - phi(m + 1);
    const double chi = 2.0 * static_cast<double>(n) * (std::log(2.0) - apen);
    return igamc(std::pow(2.0, m - 1), chi / 2.0);
}

inline double nist_binary_matrix_rank(const BitVec& seq) {
    const std::size_t n = seq.size();
    const std::size_t block = 32 * 32;
    const std::size_t matrices = n / block;
    if (matrices < 38) throw std::invalid_argument("binary_matrix_rank: sequence too short");
    auto rank32 = [](std::array<std::uint32_t, 32>& rows) {
        int rank = 0;
        for (int col = 31; col >= 0 && rank < 32; --col) {
            int pivot = -1;
            for (int r = rank; r < 32; ++r)
                if ((rows[static_cast<std::size_t>(r)] >> col) & 1u) {
                    pivot = r;
                    break;
                }
            if (pivot < 0) continue;
            std::swap(rows[static_cast<std::size_t>(rank)], rows[static_cast<std::size_t>(pivot)]);
            for (int r = 0; r < 32; ++r)
                if (r != rank && ((rows[static_cast<std::size_t>(r)] >> col) & 1u))
                    rows[static_cast<std::size_t>(r)] ^= rows[static_cast<std::size_t>(rank)];
            ++rank;
        }
        return rank;
    };
    std::size_t full = 0, minus1 = 0;
    for (std::size_t mtx = 0; mtx < matrices; ++mtx) {
        std::array<std::uint32_t, 32> rows{};
        for (std::size_t r = 0; r < 32; ++r)
            for (std::size_t c = 0; c < 32; ++c)
                if (seq.get(mtx * block + r * 32 + c)) rows[r] |= 1u << (31 - c);
        const int rk = rank32(rows);
        if (rk == 32)
            ++full;
        else if (rk == 31)
            ++minus1;
    }
    const double nm = static_cast<double>(matrices);
    const double p32 = 0.2888, p31 = 0.5776, prest = 0.1336;
    const double rest = nm - static_cast<double>(full) - static_cast<double>(minus1);
    double chi = (static_cast<double>(full) - p32 * nm) * (static_cast<double>(full) - p32 * nm) / (p32 * nm);
    chi += (static_cast<double>(minus1) - p31 * nm) * (static_cast<double>(minus1) - p31 * nm) / (p31 * nm);
    chi += (rest - prest * nm) * (rest - prest * nm) / (prest * nm);
    return std::exp(-chi / 2.0);
}

struct BatteryParams {
    double alpha = 0.01;
    std::size_t block_frequency_m = 128;
    int serial_m = 16;
    int approximate_entropy_m = 10;
    bool allow_small_battery = false;  // waive the 55-sequence minimum
};

struct TestOutcome {
    std::string name;
    std::vector<double> pvalues;
    double proportion = 0.0;
    double proportion_bound = 0.0;
    double uniformity_p = 0.0;
    bool pass = false;
};

struct TestReport {
    double alpha = 0.01;
    std::size_t sequences = 0;
    std::vector<TestOutcome> tests;
    bool all_pass = false;

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["alpha"] = alpha;
        j["sequences"] = sequences;
        j["all_pass"] = all_pass;
        j["tests"] = nlohmann::json::array();
        for (const auto& t : tests) {
            nlohmann::json jt;
            jt["name"] = t.name;
            jt["proportion"] = t.proportion;
            jt["proportion_bound"] = t.proportion_bound;
            jt["uniformity_p"] = t.uniformity_p;
            jt["pass"] = t.pass;
            jt["p_values"] = t.pvalues;
            j["tests"].push_back(jt);
        }
        return j;
    }

    std::string to_csv() const {
        std::string s = "test,p_value,success_percent,pass\n";
        for (const auto& t : tests) {
            s += t.name + "," + std::to_string(t.uniformity_p) + "," +
                 std::to_string(100.0 * t.proportion) + "," + (t.pass ? "1" : "0") + "\n";
        }
        return s;
    }
};

/// Run the native test set over many sequences and aggregate per SP800-22
/// conventions: proportion passing with the 3-sigma binomial bound, and
/// uniformity of the p-values via a 10-bin chi-square.
inline TestReport battery(const std::vector<BitVec>& seqs, const BatteryParams& params = {}) {
    if (seqs.size() < 55 && !params.allow_small_battery)
        throw std::invalid_argument("battery: need >= 55 sequences (or allow_small_battery)");
    struct Column {
        std::string name;
        std::vector<double> p;
    };
    std::vector<Column> cols = {{"monobit", {}},
                                {"block_frequency", {}},
                                {"runs", {}},
                                {"longest_run", {}},
                                {"cumulative_sums_fwd", {}},
                                {"cumulative_sums_bwd", {}},
                                {"dft_spectral", {}},
                                {"serial_1", {}},
                                {"serial_2", {}},
                                {"approximate_entropy", {}},
                                {"binary_matrix_rank", {}}};
    for (const auto& s : seqs) {
        cols[0].p.push_back(nist_monobit(s));
        cols[1].p.push_back(nist_block_frequency(s, params.block_frequency_m));
        cols[2].p.push_back(nist_runs(s));
        cols[3].p.push_back(nist_longest_run(s));
        const auto cs = nist_cumulative_sums(s);
        cols[4].p.push_back(cs.first);
        cols[5].p.push_back(cs.second);
        cols[6].p.push_back(nist_dft(s));
        const auto sr = nist_serial(s, params.serial_m);
        cols[7].p.push_back(sr.first);
        cols[8].p.push_back(sr.second);
        cols[9].p.push_back(nist_approximate_entropy(s, params.approximate_entropy_m));
        cols[10].p.push_back(nist_binary_matrix_rank(s));
    }

    TestReport report;
    report.alpha = params.alpha;
    report.sequences = seqs.size();
    report.all_pass = true;
    const double phat = 1.0 - params.alpha;
    const double bound =
        phat - 3.0 * std::sqrt(phat * params.alpha / static_cast<double>(seqs.size()));
    for (auto& col : cols) {
        TestOutcome t;
        t.name = col.name;
        t.pvalues = col.p;
        std::size_t passed = 0;
        std::array<std::size_t, 10> bins{};
        for (double p : col.p) {
            if (p >= params.alpha) ++passed;
            auto b = static_cast<std::size_t>(p * 10.0);
            if (b > 9) b = 9;
            ++bins[b];
        }
        t.proportion = static_cast<double>(passed) / static_cast<double>(col.p.size());
        t.proportion_bound = bound;
        const double expected = static_cast<double>(col.p.size()) / 10.0;
        double chi = 0.0;
        for (auto b : bins) chi += (static_cast<double>(b) - expected) * (static_cast<double>(b) - expected) / expected;
        t.uniformity_p = igamc(4.5, chi / 2.0);
        t.pass = t.proportion >= bound && t.uniformity_p >= 1e-4;
        report.all_pass = report.all_pass && t.pass;
        report.tests.push_back(std::move(t));
    }
    return report;
}

}  // namespace wpuf

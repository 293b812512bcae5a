#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "wpuf/bitvec.hpp"

namespace wpuf {

/// Context-tree weighting compression rate in bits per byte, binary alphabet,
/// Krichevsky-Trofimov leaf estimator. Reports the ideal code length
/// -log2(Pw(root)) plus a small constant framing overhead, without
/// arithmetic-coder rounding. 8.0 means incompressible.
class CtwModel {
  public:
    explicit CtwModel(int depth) : depth_(depth) {
        if (depth < 1 || depth > 20) throw std::invalid_argument("ctw: depth must be in [1, 20]");
        nodes_.push_back(Node{});
    }

    void update(const BitVec& seq) {
        std::vector<std::size_t> path(static_cast<std::size_t>(depth_) + 1);
        for (std::size_t t = 0; t < seq.size(); ++t) {
            // walk the context: most recent bit first, zeros before the start
            path[0] = 0;
            for (int d = 1; d <= depth_; ++d) {
                const bool ctx_bit =
                    t >= static_cast<std::size_t>(d) ? seq.get(t - static_cast<std::size_t>(d)) : false;
                path[static_cast<std::size_t>(d)] = child(path[static_cast<std::size_t>(d - 1)], ctx_bit);
            }
            const bool sym = seq.get(t);
            for (int d = depth_; d >= 0; --d) {
                Node& nd = nodes_[path[static_cast<std::size_t>(d)]];
                const double total = static_cast<double>(nd.c0) + static_cast<double>(nd.c1);
                const double num = 0.5 + static_cast<double>(sym ? nd.c1 : nd.c0);
                nd.lpe += std::log2(num / (total + 1.0));
                if (sym)
                    ++nd.c1;
                else
                    ++nd.c0;
                if (d == depth_) {
                    nd.lpw = nd.lpe;
                } else {
                    const double lc0 = nd.kid[0] >= 0 ? nodes_[static_cast<std::size_t>(nd.kid[0])].lpw : 0.0;
                    const double lc1 = nd.kid[1] >= 0 ? nodes_[static_cast<std::size_t>(nd.kid[1])].lpw : 0.0;
                    const double u = nd.lpe;
                    const double v = lc0 + lc1;
                    const double hi = u > v ? u : v;
                    const double lo = u > v ? v : u;
                    nd.lpw = hi + std::log2(1.0 + std::exp2(lo - hi)) - 1.0;
                }
            }
        }
        bits_seen_ += seq.size();
    }

    /// Ideal code length in bits for everything seen so far.
    double code_length_bits() const { return -nodes_[0].lpw + kFramingBits; }

    double rate_bits_per_byte() const {
        return 8.0 * code_length_bits() / static_cast<double>(bits_seen_);
    }

  private:
    static constexpr double kFramingBits = 2.0;

    struct Node {
        double lpe = 0.0;
        double lpw = 0.0;
        std::uint32_t c0 = 0;
        std::uint32_t c1 = 0;
        std::int32_t kid[2] = {-1, -1};
    };

    std::size_t child(std::size_t parent, bool bit) {
        auto& slot = nodes_[parent].kid[bit ? 1 : 0];
        if (slot < 0) {
            slot = static_cast<std::int32_t>(nodes_.size());
            nodes_.push_back(Node{});
        }
        return static_cast<std::size_t>(slot);
    }

    int depth_;
    std::vector<Node> nodes_;
    std::size_t bits_seen_ = 0;
};

inline double ctw_rate(const BitVec& seq, int depth = 8) {
    if (seq.size() < 8 * (static_cast<std::size_t>(depth) + 1))
        throw std::invalid_argument("ctw_rate: sequence too short for depth");
    CtwModel model(depth);
    model.update(seq);
    return model.rate_bits_per_byte();
}

}  // namespace wpuf

#pragma once

// Shared helpers for the test suites.

#include <vector>

#include "gale/codes.hpp"
#include "gale/gales.hpp"

namespace gale::test {

inline std::vector<BitString> all_strings_up_to(std::size_t max_len) {
    std::vector<BitString> all;
    Integer n = 0;
    while (true) {
        BitString w = sigma(n);
        if (w.size() > max_len) break;
        all.push_back(std::move(w));
        n += 1;
    }
    return all;
}

inline std::vector<BitString> strings_of_length(std::size_t len) {
    std::vector<BitString> all;
    std::uint64_t count = 1ull << len;
    for (std::uint64_t v = 0; v < count; ++v) {
        BitString w;
        for (std::size_t j = 0; j < len; ++j) w.push_back((v >> (len - 1 - j)) & 1);
        all.push_back(std::move(w));
    }
    return all;
}

inline std::vector<ModelPtr> builtin_models() {
    return {uniform_model(), bernoulli_model(make_rational(1, 4)), kt_model(),
            mixture_model({kt_model(), bernoulli_model(make_rational(1, 4))},
                          {make_rational(1, 2), make_rational(1, 2)})};
}

// Position-dependent bettor: bets q0 on ones at even positions and q1 at odd
// positions. A valid martingale whose block values depend on where the ones
// sit, so it exercises the generic (non-exchangeable) enumeration path.
class PositionBiasModel final : public MartingaleModel {
public:
    PositionBiasModel(Rational q_even, Rational q_odd)
        : q_{std::move(q_even), std::move(q_odd)} {}

    std::string name() const override { return "position-bias"; }
    std::vector<std::uint8_t> spec_bytes() const override { return {0x7F}; }

    struct PosState final : State {
        std::uint64_t pos = 0;
        std::unique_ptr<State> clone() const override {
            auto s = std::make_unique<PosState>();
            s->pos = pos;
            return s;
        }
    };

    std::unique_ptr<State> initial_state() const override { return std::make_unique<PosState>(); }

    void advance(State& state, Rational& capital, bool bit) const override {
        auto& s = static_cast<PosState&>(state);
        const Rational& q = q_[s.pos % 2];
        Rational factor = bit ? Rational(2 * q) : Rational(2 - 2 * q);
        capital *= factor;
        ++s.pos;
    }

    Rational completion_bound(const State& state, std::uint64_t remaining) const override {
        const auto& s = static_cast<const PosState&>(state);
        Rational bound = 1;
        for (std::uint64_t t = 0; t < remaining; ++t) {
            const Rational& q = q_[(s.pos + t) % 2];
            Rational up(2 * q);
            Rational down(2 - 2 * q);
            bound *= cmp(up, down) > 0 ? up : down;
        }
        return bound;
    }

private:
    Rational q_[2];
};

inline ModelPtr position_bias_model() {
    return std::make_shared<PositionBiasModel>(make_rational(1, 4), make_rational(2, 3));
}

}  // namespace gale::test

#include "gale/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace gale {

namespace {

class ZerosSource final : public BitSource {
public:
    bool bit(std::uint64_t) const override { return false; }
    std::string describe() const override { return "zeros"; }
};

class PeriodicSource final : public BitSource {
public:
    explicit PeriodicSource(BitString pattern) : pattern_(std::move(pattern)) {
        if (pattern_.empty()) throw EmptyPattern("periodic source needs a nonempty pattern");
    }
    bool bit(std::uint64_t index) const override { return pattern_[index % pattern_.size()]; }
    std::string describe() const override { return "periodic:" + pattern_.str(); }

private:
    BitString pattern_;
};

class BernoulliSource final : public BitSource {
public:
    BernoulliSource(const Rational& p, std::uint64_t seed) : p_(p), seed_(seed) {
        if (cmp(p, Rational(0)) <= 0 || cmp(p, Rational(1)) >= 0)
            throw ParameterOutOfRange("source bias must be strictly between 0 and 1");
        // floor(p·2^64) fits 64 bits because p < 1
        Integer t = p.get_num();
        mpz_mul_2exp(t.get_mpz_t(), t.get_mpz_t(), 64);
        mpz_fdiv_q(t.get_mpz_t(), t.get_mpz_t(), p.get_den().get_mpz_t());
        static_assert(sizeof(unsigned long) == 8, "64-bit limbs expected");
        threshold_ = t.get_ui();
    }

    bool bit(std::uint64_t index) const override {
        return SplitMix64::at(seed_, index) < threshold_;
    }

    std::string describe() const override {
        std::ostringstream os;
        os << "bernoulli:" << p_.get_num() << "/" << p_.get_den() << ":" << seed_;
        return os.str();
    }

private:
    Rational p_;
    std::uint64_t seed_;
    std::uint64_t threshold_;
};

class RegimeSource final : public BitSource {
public:
    RegimeSource(std::vector<SourcePtr> subs, std::vector<std::uint64_t> switches)
        : subs_(std::move(subs)), switches_(std::move(switches)) {
        if (subs_.empty()) throw ParameterOutOfRange("regime source needs sub-sources");
        for (const auto& s : subs_)
            if (!s) throw ParameterOutOfRange("null regime sub-source");
        for (std::size_t i = 1; i < switches_.size(); ++i)
            if (switches_[i] <= switches_[i - 1])
                throw ParameterOutOfRange("switch offsets must be strictly increasing");
    }

    bool bit(std::uint64_t index) const override {
        std::size_t passed = static_cast<std::size_t>(
            std::upper_bound(switches_.begin(), switches_.end(), index) - switches_.begin());
        return subs_[passed % subs_.size()]->bit(index);
    }

    std::string describe() const override {
        std::ostringstream os;
        os << "regime:";
        for (std::size_t i = 0; i < subs_.size(); ++i) os << (i ? "+" : "") << subs_[i]->describe();
        os << "@";
        for (std::size_t i = 0; i < switches_.size(); ++i) os << (i ? "," : "") << switches_[i];
        return os.str();
    }

private:
    std::vector<SourcePtr> subs_;
    std::vector<std::uint64_t> switches_;
};

std::uint64_t parse_u64(const std::string& text) {
    if (text.empty()) throw ParameterOutOfRange("empty number");
    return std::stoull(text, nullptr, 0);
}

Rational parse_fraction(const std::string& text) {
    auto slash = text.find('/');
    if (slash == std::string::npos)
        throw ParameterOutOfRange("expected num/den fraction: " + text);
    Integer num, den;
    if (mpz_set_str(num.get_mpz_t(), text.substr(0, slash).c_str(), 10) != 0 ||
        mpz_set_str(den.get_mpz_t(), text.substr(slash + 1).c_str(), 10) != 0)
        throw ParameterOutOfRange("malformed fraction: " + text);
    return make_rational(num, den);
}

}  // namespace

SourcePtr zeros_source() { return std::make_shared<ZerosSource>(); }

SourcePtr periodic_source(const BitString& pattern) {
    return std::make_shared<PeriodicSource>(pattern);
}

SourcePtr bernoulli_source(const Rational& p, std::uint64_t seed) {
    return std::make_shared<BernoulliSource>(p, seed);
}

SourcePtr regime_source(std::vector<SourcePtr> subs, std::vector<std::uint64_t> switches) {
    return std::make_shared<RegimeSource>(std::move(subs), std::move(switches));
}

SourcePtr source_from_spec(const std::string& spec) {
    if (spec == "zeros") return zeros_source();
    if (spec.rfind("periodic:", 0) == 0)
        return periodic_source(BitString::parse(spec.substr(9)));
    if (spec.rfind("bernoulli:", 0) == 0) {
        std::string rest = spec.substr(10);
        auto colon = rest.rfind(':');
        if (colon == std::string::npos)
            throw ParameterOutOfRange("bernoulli source needs num/den:seed");
        return bernoulli_source(parse_fraction(rest.substr(0, colon)),
                                parse_u64(rest.substr(colon + 1)));
    }
    if (spec.rfind("regime:", 0) == 0) {
        std::string rest = spec.substr(7);
        auto at = rest.rfind('@');
        if (at == std::string::npos) throw ParameterOutOfRange("regime source needs @offsets");
        std::vector<SourcePtr> subs;
        std::string subs_text = rest.substr(0, at);
        std::size_t start = 0;
        while (start <= subs_text.size()) {
            auto plus = subs_text.find('+', start);
            std::string one =
                plus == std::string::npos ? subs_text.substr(start) : subs_text.substr(start, plus - start);
            subs.push_back(source_from_spec(one));
            if (plus == std::string::npos) break;
            start = plus + 1;
        }
        std::vector<std::uint64_t> switches;
        std::stringstream offsets(rest.substr(at + 1));
        std::string item;
        while (std::getline(offsets, item, ',')) switches.push_back(parse_u64(item));
        return regime_source(std::move(subs), std::move(switches));
    }
    throw ParameterOutOfRange("unknown source spec: " + spec);
}

double entropy(const Rational& p) {
    if (cmp(p, Rational(0)) <= 0 || cmp(p, Rational(1)) >= 0)
        throw ParameterOutOfRange("entropy needs a bias strictly between 0 and 1");
    double x = to_double(p);
    return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

DimensionReport dimension_report(const BitSource& source, const MartingaleModel& m,
                                 const BlockSchedule& sched, std::uint32_t block_count,
                                 EnumLimits limits) {
    auto [stream, records] = encode_blocks_traced(source, m, sched, block_count, limits);
    (void)stream;
    DimensionReport report;
    report.source_desc = source.describe();
    report.model_name = m.name();
    report.schedule = sched;
    report.rows.reserve(records.size());

    double log_sum = 0.0;
    std::uint64_t index_bits_sum = 0;
    std::uint64_t thresh_bits_sum = 0;
    for (const BlockRecord& rec : records) {
        ReportRow row;
        row.i = rec.i;
        row.k = rec.k;
        row.n_end = rec.n_end;
        row.size_A = rec.admitted_size;
        row.log2_size_A = log2_rational(Rational(rec.admitted_size));
        row.l_diag = static_cast<double>(rec.k) -
                     log2_rational(rec.capital_after / rec.capital_before);
        row.enc_p_bits = rec.index_bits;
        row.thresh_bits = rec.threshold_bits;

        log_sum += row.log2_size_A;
        index_bits_sum += rec.index_bits;
        thresh_bits_sum += rec.threshold_bits;

        Integer n_end(static_cast<unsigned long>(rec.n_end));
        row.index_sum_ratio = log_sum / static_cast<double>(rec.n_end);
        row.index_bits_ratio = make_rational(Integer(static_cast<unsigned long>(index_bits_sum)), n_end);
        row.overhead_bits_ratio =
            make_rational(Integer(static_cast<unsigned long>(thresh_bits_sum)), n_end);
        row.total_ratio_exact = row.index_bits_ratio + row.overhead_bits_ratio;
        row.total_ratio = to_double(row.total_ratio_exact);
        report.rows.push_back(std::move(row));
    }
    return report;
}

std::string export_csv(const DimensionReport& report) {
    std::string out = "i,k,n_end,sizeA,enc_p_bits,thresh_bits,index_ratio,total_ratio\n";
    char buf[64];
    for (const ReportRow& row : report.rows) {
        out += std::to_string(row.i) + "," + std::to_string(row.k) + "," +
               std::to_string(row.n_end) + "," + row.size_A.get_str() + "," +
               std::to_string(row.enc_p_bits) + "," + std::to_string(row.thresh_bits) + ",";
        std::snprintf(buf, sizeof buf, "%.6f,%.6f\n", row.index_sum_ratio, row.total_ratio);
        out += buf;
    }
    return out;
}

std::vector<CurvePoint> capital_curve(const MartingaleModel& m, const BitSource& source,
                                      std::uint64_t n_max, const Rational& s) {
    std::vector<CurvePoint> curve;
    curve.reserve(n_max);
    ModelCursor cur = m.start();
    Rational initial = cur.capital();
    Rational growth = Rational(1) - s;  // exponent grows by (1-s) per bit
    for (std::uint64_t n = 1; n <= n_max; ++n) {
        cur.advance(source.bit(n - 1));
        ScaledPow2 lhs{cur.capital(), 0};
        ScaledPow2 rhs{initial, growth * Rational(static_cast<unsigned long>(n))};
        curve.push_back(CurvePoint{n, compare_pow2(lhs, rhs)});
    }
    return curve;
}

}  // namespace gale

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gale/blockcodec.hpp"
#include "gale/source.hpp"

namespace gale {

// Synthetic sources. All are fully pinned: the same spec yields the same bits
// on every platform.
SourcePtr zeros_source();
SourcePtr periodic_source(const BitString& pattern);
// Bit j is 1 iff the j-th splitmix64 output for this seed falls below
// floor(p·2^64).
SourcePtr bernoulli_source(const Rational& p, std::uint64_t seed);
// Switches between sub-sources at the given strictly increasing offsets,
// cycling through them; bits are drawn from the active sub-source at the
// absolute position.
SourcePtr regime_source(std::vector<SourcePtr> subs, std::vector<std::uint64_t> switches);

// Text specs: "zeros", "periodic:<bits>", "bernoulli:<num>/<den>:<seed>",
// "regime:<sub>+<sub>+...@<off1>,<off2>,...".
SourcePtr source_from_spec(const std::string& spec);

// Binary entropy of p, in bits. Diagnostics only.
double entropy(const Rational& p);

// Per-block diagnostics for a block-coded run. The ratios labelled exact are
// bit counts over prefix lengths; the log-based columns are floating-point
// diagnostics and never feed back into coding.
struct ReportRow {
    std::uint64_t i = 0;
    std::uint64_t k = 0;
    std::uint64_t n_end = 0;          // n(i+1)
    Integer size_A;                   // admitted-set size
    double log2_size_A = 0.0;
    double l_diag = 0.0;              // k - log2(capital_end/capital_start)
    std::uint64_t enc_p_bits = 0;
    std::uint64_t thresh_bits = 0;
    double index_sum_ratio = 0.0;     // sum of log2|A_j| over n_end
    double total_ratio = 0.0;         // (index bits + threshold bits) over n_end
    Rational total_ratio_exact;       // same, as an exact rational
    Rational index_bits_ratio;        // sum |enc(p_j)| / n_end
    Rational overhead_bits_ratio;     // sum threshold bits / n_end
};

struct DimensionReport {
    std::string source_desc;
    std::string model_name;
    BlockSchedule schedule = BlockSchedule::paper();
    std::vector<ReportRow> rows;
};

DimensionReport dimension_report(const BitSource& source, const MartingaleModel& m,
                                 const BlockSchedule& sched, std::uint32_t block_count,
                                 EnumLimits limits = {});

// One row per block: i,k,n_end,sizeA,enc_p_bits,thresh_bits,index_ratio,
// total_ratio. LF line endings, '.'-decimal floats with six digits.
std::string export_csv(const DimensionReport& report);

// Exact sign of value(S|n) against 2^((1-s)·n)·value(empty), per n.
struct CurvePoint {
    std::uint64_t n = 0;
    int sign = 0;  // <0, 0, >0
};
std::vector<CurvePoint> capital_curve(const MartingaleModel& m, const BitSource& source,
                                      std::uint64_t n_max, const Rational& s);

}  // namespace gale

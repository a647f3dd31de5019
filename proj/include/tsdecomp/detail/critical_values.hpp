#pragma once

// Generated by tools/gen_critical_values.cpp with seed 19671 and 200000 replications per sample size.
// Do not edit by hand; rerun the generator instead.

#include <array>
#include <cstddef>

namespace tsdecomp::detail {

/// Tail probabilities of the tabulated critical values.
inline constexpr std::array<double, 4> kCriticalProbabilities = {0.01, 0.025, 0.05, 0.10};
inline constexpr std::array<std::size_t, 5> kCriticalSampleSizes = {25, 50, 100, 250, 500};

/// values[size][prob]: KPSS tables hold upper-tail quantiles (reject when larger),
/// ADF tables hold lower-tail quantiles (reject when smaller).
struct CriticalTable {
    std::array<std::array<double, 4>, 5> values;
};

inline constexpr CriticalTable kKpssLevel = {{{
    {{0.565151, 0.491287, 0.425052, 0.347042}},  // N = 25
    {{0.611140, 0.514593, 0.434982, 0.345707}},  // N = 50
    {{0.658061, 0.539617, 0.443573, 0.345458}},  // N = 100
    {{0.704954, 0.560035, 0.452890, 0.347040}},  // N = 250
    {{0.717536, 0.569395, 0.456690, 0.346706}},  // N = 500
}}};

inline constexpr CriticalTable kKpssTrend = {{{
    {{0.171395, 0.154822, 0.140337, 0.123290}},  // N = 25
    {{0.181351, 0.159960, 0.140662, 0.120322}},  // N = 50
    {{0.193248, 0.165501, 0.142646, 0.119765}},  // N = 100
    {{0.205859, 0.171740, 0.145478, 0.119174}},  // N = 250
    {{0.210023, 0.173430, 0.145961, 0.119096}},  // N = 500
}}};

inline constexpr CriticalTable kAdfNoDriftNoTrend = {{{
    {{-3.541741, -3.144899, -2.833225, -2.501184}},  // N = 25
    {{-3.458708, -3.112308, -2.828392, -2.520561}},  // N = 50
    {{-3.398395, -3.082589, -2.817271, -2.520620}},  // N = 100
    {{-3.392042, -3.086970, -2.824469, -2.531069}},  // N = 250
    {{-3.413304, -3.099559, -2.842547, -2.547030}},  // N = 500
}}};

inline constexpr CriticalTable kAdfDrift = {{{
    {{-3.716892, -3.284388, -2.944863, -2.585129}},  // N = 25
    {{-3.574568, -3.200516, -2.903239, -2.580198}},  // N = 50
    {{-3.460650, -3.126074, -2.856805, -2.551347}},  // N = 100
    {{-3.436838, -3.114731, -2.853313, -2.556117}},  // N = 250
    {{-3.433609, -3.115072, -2.855552, -2.560853}},  // N = 500
}}};

inline constexpr CriticalTable kAdfDriftTrend = {{{
    {{-4.370232, -3.909767, -3.548416, -3.176066}},  // N = 25
    {{-4.136647, -3.772682, -3.475287, -3.153976}},  // N = 50
    {{-4.003600, -3.678517, -3.410083, -3.114159}},  // N = 100
    {{-3.964515, -3.656693, -3.399869, -3.114926}},  // N = 250
    {{-3.962292, -3.658310, -3.398055, -3.114755}},  // N = 500
}}};

} // namespace tsdecomp::detail

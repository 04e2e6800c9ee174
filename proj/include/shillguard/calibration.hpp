#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>

#include "shillguard/rdakf.hpp"

namespace shillguard {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

// Standard-normal quantile for a two-sided interval at the given confidence
// level: the z with Phi(z) = 1 - (1 - confidence) / 2. Rational-approximation
// inverse CDF, refined to well under 1e-6 absolute error.
double z_value(double confidence);

// Quantile of the standard normal at probability p in (0, 1).
double inverse_normal_cdf(double p);

// (mean - s*Z, mean + s*Z) over the samples; s is the sample standard
// deviation. Requires at least two samples.
Interval interval(std::span<const double> samples, double confidence);

struct Thresholds {
  double eta = 0.0;          // upper bound on total deviation v
  double eta_A = 0.0;        // upper bound on average deviation v_A
  double eta_lower = 0.0;    // symmetric lower bounds, used for nuke detection
  double eta_A_lower = 0.0;
  double conf_total = 0.99;
  double conf_avg = 0.90;
  std::int64_t sample_count = 0;
};

// Pools all v and all v_A values from the records and takes the interval
// bounds at the two confidence levels.
Thresholds train_thresholds(std::span<const DeviationRecord> devs, double conf_total = 0.99,
                            double conf_avg = 0.90);

// key=value text format consumed by the detect subcommand.
void save_thresholds(std::ostream& out, const Thresholds& th);
Thresholds load_thresholds(std::istream& in);
Thresholds load_thresholds_file(const std::filesystem::path& path);

}  // namespace shillguard

#include "shillguard/calibration.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>

#include "shillguard/error.hpp"

namespace shillguard {

namespace {

// Acklam's rational approximation of the probit function, followed by one
// Halley refinement against erfc. Absolute error is far below the 1e-6
// contract across (0, 1).
double probit(double p) {
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  static constexpr double p_low = 0.02425;

  double x = 0.0;
  if (p < p_low) {
    const double u = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * u + c[1]) * u + c[2]) * u + c[3]) * u + c[4]) * u + c[5]) /
        ((((d[0] * u + d[1]) * u + d[2]) * u + d[3]) * u + 1.0);
  } else if (p <= 1.0 - p_low) {
    const double u = p - 0.5;
    const double t = u * u;
    x = (((((a[0] * t + a[1]) * t + a[2]) * t + a[3]) * t + a[4]) * t + a[5]) * u /
        (((((b[0] * t + b[1]) * t + b[2]) * t + b[3]) * t + b[4]) * t + 1.0);
  } else {
    const double u = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * u + c[1]) * u + c[2]) * u + c[3]) * u + c[4]) * u + c[5]) /
        ((((d[0] * u + d[1]) * u + d[2]) * u + d[3]) * u + 1.0);
  }

  const double err = 0.5 * std::erfc(-x / std::numbers::sqrt2) - p;
  const double step = err * std::sqrt(2.0 * std::numbers::pi) * std::exp(x * x / 2.0);
  return x - step / (1.0 + x * step / 2.0);
}

}  // namespace

double inverse_normal_cdf(double p) {
  if (!(p > 0.0 && p < 1.0)) throw ValidationError("quantile probability must lie in (0, 1)");
  return probit(p);
}

double z_value(double confidence) {
  if (!(confidence > 0.0 && confidence < 1.0))
    throw ValidationError("confidence level must lie in (0, 1)");
  return inverse_normal_cdf(1.0 - (1.0 - confidence) / 2.0);
}

Interval interval(std::span<const double> samples, double confidence) {
  if (samples.size() < 2) throw ValidationError("interval requires at least 2 samples");
  const auto n = static_cast<double>(samples.size());
  double mean = 0.0;
  for (const double s : samples) mean += s;
  mean /= n;
  double sq = 0.0;
  for (const double s : samples) {
    const double d = s - mean;
    sq += d * d;
  }
  const double stddev = std::sqrt(sq / (n - 1.0));
  const double half = stddev * z_value(confidence);
  return {mean - half, mean + half};
}

Thresholds train_thresholds(std::span<const DeviationRecord> devs, double conf_total,
                            double conf_avg) {
  if (devs.size() < 2) throw ValidationError("threshold training requires at least 2 deviations");
  std::vector<double> totals;
  std::vector<double> averages;
  totals.reserve(devs.size());
  averages.reserve(devs.size());
  for (const DeviationRecord& d : devs) {
    totals.push_back(d.v);
    averages.push_back(d.v_A);
  }
  const Interval total_iv = interval(totals, conf_total);
  const Interval avg_iv = interval(averages, conf_avg);

  Thresholds th;
  th.eta = total_iv.hi;
  th.eta_lower = total_iv.lo;
  th.eta_A = avg_iv.hi;
  th.eta_A_lower = avg_iv.lo;
  th.conf_total = conf_total;
  th.conf_avg = conf_avg;
  th.sample_count = static_cast<std::int64_t>(devs.size());
  return th;
}

void save_thresholds(std::ostream& out, const Thresholds& th) {
  const auto put = [&out](const char* key, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << key << '=' << buf << '\n';
  };
  put("eta", th.eta);
  put("eta_A", th.eta_A);
  put("eta_lower", th.eta_lower);
  put("eta_A_lower", th.eta_A_lower);
  put("conf_total", th.conf_total);
  put("conf_avg", th.conf_avg);
  out << "sample_count=" << th.sample_count << '\n';
}

Thresholds load_thresholds(std::istream& in) {
  std::map<std::string, std::string, std::less<>> kv;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("expected key=value", line_no);
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }

  const auto get = [&kv](const char* key) -> double {
    const auto it = kv.find(key);
    if (it == kv.end())
      throw ValidationError("thresholds file is missing key '" + std::string(key) + "'");
    try {
      return std::stod(it->second);
    } catch (const std::exception&) {
      throw ValidationError("bad value for key '" + std::string(key) + "': " + it->second);
    }
  };

  Thresholds th;
  th.eta = get("eta");
  th.eta_A = get("eta_A");
  th.eta_lower = get("eta_lower");
  th.eta_A_lower = get("eta_A_lower");
  th.conf_total = get("conf_total");
  th.conf_avg = get("conf_avg");
  th.sample_count = static_cast<std::int64_t>(get("sample_count"));
  if (th.eta_lower > th.eta || th.eta_A_lower > th.eta_A)
    throw ValidationError("thresholds file: lower bounds exceed upper bounds");
  if (!(th.conf_total > 0.0 && th.conf_total < 1.0) || !(th.conf_avg > 0.0 && th.conf_avg < 1.0))
    throw ValidationError("thresholds file: confidence levels must lie in (0, 1)");
  return th;
}

Thresholds load_thresholds_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return load_thresholds(in);
}

}  // namespace shillguard

#include "vri/synth.hpp"

#include <charconv>
#include <cmath>
#include <complex>
#include <cstdio>
#include <mutex>

#include <boost/math/special_functions/gamma.hpp>
#include <fftw3.h>

#include "vri/error.hpp"
#include "vri/kernels.hpp"
#include "vri/rng.hpp"

namespace vri {
namespace {

std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

// Forward DFT, y_j = sum_k x_k exp(-2 pi i j k / n).
void forward_dft(std::vector<std::complex<double>>& data) {
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_plan plan;
  {
    std::lock_guard lock(fftw_planner_mutex());
    plan = fftw_plan_dft_1d(static_cast<int>(data.size()), buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  std::lock_guard lock(fftw_planner_mutex());
  fftw_destroy_plan(plan);
}

std::vector<double> long_memory(const GeneratorSpec& spec, Pcg64& rng) {
  std::size_t half = 1;
  while (half < spec.length) half <<= 1;
  const std::size_t size = 2 * half;

  // First row of the circulant embedding of the fGn covariance.
  std::vector<std::complex<double>> row(size);
  for (std::size_t k = 0; k <= half; ++k) row[k] = fgn_autocovariance(spec.hurst, k);
  for (std::size_t k = half + 1; k < size; ++k) row[k] = row[size - k];
  forward_dft(row);

  double max_eig = 0.0;
  for (const auto& e : row) max_eig = std::max(max_eig, e.real());
  std::vector<std::complex<double>> w(size);
  for (std::size_t k = 0; k < size; ++k) {
    double eig = row[k].real();
    if (eig < 0.0) {
      if (eig < -1e-9 * max_eig) throw Error(ErrorKind::bad_generator_spec, "embedding not positive definite");
      eig = 0.0;
    }
    const double re = rng.normal();
    const double im = rng.normal();
    w[k] = std::sqrt(eig / static_cast<double>(size)) * std::complex<double>(re, im);
  }
  forward_dft(w);

  std::vector<double> out(spec.length);
  for (std::size_t i = 0; i < spec.length; ++i) out[i] = std::abs(w[i].real());
  return out;
}

bool parse_double(std::string_view text, double& out) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return !text.empty() && ec == std::errc{} && ptr == end;
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

double fgn_autocovariance(double hurst, std::size_t lag) {
  const double k = static_cast<double>(lag);
  const double h2 = 2.0 * hurst;
  return 0.5 * (std::pow(k + 1.0, h2) - 2.0 * std::pow(k, h2) + std::pow(std::abs(k - 1.0), h2));
}

double stretched_exp_cdf(double x, double gamma, double alpha) {
  if (!(x > 0.0)) return 0.0;
  return boost::math::gamma_p(1.0 / gamma, alpha * std::pow(x, gamma));
}

std::string_view to_string(GeneratorKind kind) noexcept {
  switch (kind) {
    case GeneratorKind::iid_gaussian: return "iid_gaussian";
    case GeneratorKind::iid_exceedance: return "iid_exceedance";
    case GeneratorKind::random_walk: return "random_walk";
    case GeneratorKind::stretched_exp_intervals: return "stretched_exp_intervals";
    case GeneratorKind::long_memory_volatility: return "long_memory_volatility";
  }
  return "unknown";
}

void GeneratorSpec::validate() const {
  auto fail = [](const std::string& why) { throw Error(ErrorKind::bad_generator_spec, why); };
  if (length < 1) fail("length must be >= 1");
  switch (kind) {
    case GeneratorKind::iid_exceedance:
      if (!(p > 0.0 && p < 1.0)) fail("need 0 < p < 1");
      break;
    case GeneratorKind::stretched_exp_intervals:
      if (!(gamma > 0.0) || !(alpha > 0.0) || !std::isfinite(gamma) || !std::isfinite(alpha)) {
        fail("need gamma > 0 and alpha > 0");
      }
      break;
    case GeneratorKind::long_memory_volatility:
      // H = 0.5 is admitted as the uncorrelated limit.
      if (!(hurst >= 0.5 && hurst < 1.0)) fail("need 0.5 <= H < 1");
      break;
    default:
      break;
  }
}

GeneratorSpec GeneratorSpec::parse(std::string_view text, std::size_t length, std::uint64_t seed) {
  GeneratorSpec spec;
  spec.length = length;
  spec.seed = seed;
  const auto open = text.find('(');
  const std::string_view name = text.substr(0, open);
  bool known = false;
  for (auto kind : {GeneratorKind::iid_gaussian, GeneratorKind::iid_exceedance, GeneratorKind::random_walk,
                    GeneratorKind::stretched_exp_intervals, GeneratorKind::long_memory_volatility}) {
    if (name == vri::to_string(kind)) {
      spec.kind = kind;
      known = true;
    }
  }
  if (!known) throw Error(ErrorKind::bad_generator_spec, "unknown generator '" + std::string(name) + "'");

  std::vector<std::pair<std::string, double>> args;
  if (open != std::string_view::npos) {
    if (text.back() != ')') throw Error(ErrorKind::bad_generator_spec, "missing ')'");
    std::string_view inner = text.substr(open + 1, text.size() - open - 2);
    while (!inner.empty()) {
      const auto comma = inner.find(',');
      std::string_view item = inner.substr(0, comma);
      inner = comma == std::string_view::npos ? std::string_view{} : inner.substr(comma + 1);
      std::string key;
      if (const auto eq = item.find('='); eq != std::string_view::npos) {
        key = std::string(item.substr(0, eq));
        item = item.substr(eq + 1);
      }
      double value = 0.0;
      if (!parse_double(item, value)) {
        throw Error(ErrorKind::bad_generator_spec, "bad parameter '" + std::string(item) + "'");
      }
      args.emplace_back(key, value);
    }
  }

  std::vector<std::pair<std::string, double*>> slots;
  switch (spec.kind) {
    case GeneratorKind::iid_exceedance: slots = {{"p", &spec.p}}; break;
    case GeneratorKind::stretched_exp_intervals: slots = {{"gamma", &spec.gamma}, {"alpha", &spec.alpha}}; break;
    case GeneratorKind::long_memory_volatility: slots = {{"H", &spec.hurst}}; break;
    default: break;
  }
  if (args.size() > slots.size()) throw Error(ErrorKind::bad_generator_spec, "too many parameters");
  for (std::size_t i = 0; i < args.size(); ++i) {
    double* target = nullptr;
    if (args[i].first.empty()) {
      target = slots[i].second;
    } else {
      for (auto& [key, slot] : slots) {
        if (key == args[i].first || (key == "H" && args[i].first == "hurst")) target = slot;
      }
      if (!target) throw Error(ErrorKind::bad_generator_spec, "unknown parameter '" + args[i].first + "'");
    }
    *target = args[i].second;
  }
  spec.validate();
  return spec;
}

std::string GeneratorSpec::to_string() const {
  std::string out(vri::to_string(kind));
  switch (kind) {
    case GeneratorKind::iid_exceedance: out += "(p=" + fmt17(p) + ")"; break;
    case GeneratorKind::stretched_exp_intervals:
      out += "(gamma=" + fmt17(gamma) + ",alpha=" + fmt17(alpha) + ")";
      break;
    case GeneratorKind::long_memory_volatility: out += "(H=" + fmt17(hurst) + ")"; break;
    default: break;
  }
  return out;
}

std::vector<double> generate(const GeneratorSpec& spec, Exec exec) {
  spec.validate();
  Pcg64 rng(spec.seed, 0);
  std::vector<double> out(spec.length);
  switch (spec.kind) {
    case GeneratorKind::iid_gaussian:
      for (auto& v : out) v = rng.normal();
      break;
    case GeneratorKind::iid_exceedance:
      for (auto& v : out) v = rng.uniform() < spec.p ? 1.0 : 0.0;
      break;
    case GeneratorKind::random_walk: {
      double level = 0.0;
      for (auto& v : out) {
        level += (rng.next() >> 63) != 0 ? 1.0 : -1.0;
        v = level;
      }
      break;
    }
    case GeneratorKind::stretched_exp_intervals: {
      std::vector<double> u(spec.length);
      for (auto& v : u) v = rng.uniform_open();
      if (exec == Exec::serial) {
        kernels::stretched_exp_quantiles_serial(u, spec.gamma, spec.alpha, out);
      } else {
        kernels::stretched_exp_quantiles_parallel(u, spec.gamma, spec.alpha, out);
      }
      break;
    }
    case GeneratorKind::long_memory_volatility:
      out = long_memory(spec, rng);
      break;
  }
  return out;
}

}  // namespace vri

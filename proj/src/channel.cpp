#include "fhqr/channel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "fhqr/error.hpp"

namespace fhqr {

void TdlProfile::validate() const {
  if (tap_delays_ns.empty()) throw InvalidInput("profile '" + name + "' has no taps");
  if (tap_delays_ns.size() != tap_powers_db.size()) {
    throw InvalidInput("profile '" + name + "': delay and power lists differ in length");
  }
  for (std::size_t i = 0; i < tap_delays_ns.size(); ++i) {
    if (!(tap_delays_ns[i] >= 0.0) || !std::isfinite(tap_powers_db[i])) {
      throw InvalidInput("profile '" + name + "': invalid tap " + std::to_string(i));
    }
    if (i > 0 && tap_delays_ns[i] < tap_delays_ns[i - 1]) {
      throw InvalidInput("profile '" + name + "': delays must be non-decreasing");
    }
  }
}

std::vector<double> TdlProfile::normalized_powers() const {
  std::vector<double> p(tap_powers_db.size());
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    p[i] = std::pow(10.0, tap_powers_db[i] / 10.0);
    total += p[i];
  }
  for (auto& v : p) v /= total;
  return p;
}

double TdlProfile::rms_delay_spread_ns() const {
  const auto p = normalized_powers();
  double mean = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) mean += p[i] * tap_delays_ns[i];
  double var = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) var += p[i] * std::pow(tap_delays_ns[i] - mean, 2);
  return std::sqrt(var);
}

TdlProfile tdla30_profile() {
  return TdlProfile{
      "tdla30",
      {0, 10, 15, 20, 25, 50, 65, 75, 105, 135, 150, 290},
      {-15.5, 0.0, -5.1, -5.1, -9.6, -8.2, -13.1, -11.5, -11.0, -16.2, -16.6, -26.2},
      true};
}

TdlProfile awgn_profile() { return TdlProfile{"awgn", {0.0}, {0.0}, false}; }

TdlProfile parse_profile(std::istream& in, const std::string& default_name) {
  TdlProfile p;
  p.name = default_name;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first)) continue;
    if (first == "name") {
      if (!(ls >> p.name)) throw ConfigError("profile line " + std::to_string(line_no) + ": missing name");
      continue;
    }
    double delay = 0.0;
    double power = 0.0;
    std::istringstream fs(first);
    if (!(fs >> delay) || !(ls >> power)) {
      throw ConfigError("profile line " + std::to_string(line_no) + ": expected 'delay_ns power_db'");
    }
    p.tap_delays_ns.push_back(delay);
    p.tap_powers_db.push_back(power);
  }
  p.validate();
  return p;
}

TdlProfile load_profile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open profile file '" + path + "'");
  return parse_profile(in, path);
}

TdlProfile resolve_profile(const std::string& name_or_path) {
  if (name_or_path == "tdla30") return tdla30_profile();
  if (name_or_path == "awgn") return awgn_profile();
  return load_profile(name_or_path);
}

namespace {

std::vector<std::size_t> rounded_delays(const TdlProfile& profile, double sample_rate_hz,
                                        double delay_scale) {
  std::vector<std::size_t> d(profile.tap_delays_ns.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    d[i] = static_cast<std::size_t>(
        std::llround(profile.tap_delays_ns[i] * delay_scale * 1e-9 * sample_rate_hz));
  }
  return d;
}

}  // namespace

std::vector<std::size_t> sample_delays(const TdlProfile& profile, double sample_rate_hz,
                                       double delay_scale) {
  profile.validate();
  auto d = rounded_delays(profile, sample_rate_hz, delay_scale);
  d.erase(std::unique(d.begin(), d.end()), d.end());
  return d;
}

IQMatrix exp_correlation_sqrt(double rho, std::size_t n_r) {
  if (!(rho >= 0.0 && rho < 1.0)) {
    throw InvalidInput("correlation coefficient must lie in [0, 1), got " + std::to_string(rho));
  }
  if (n_r == 0) throw InvalidInput("exp_correlation_sqrt: n_r must be positive");
  // Closed-form Cholesky factor of the Kac-Murdock-Szego matrix:
  // L[i][j] = rho^(i-j) for j = 0, rho^(i-j) sqrt(1 - rho^2) for 0 < j <= i.
  IQMatrix l(n_r, n_r);
  const double tail = std::sqrt(1.0 - rho * rho);
  for (std::size_t i = 0; i < n_r; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      const double p = std::pow(rho, static_cast<double>(i - j));
      l(i, j) = j == 0 ? p : p * tail;
    }
  }
  return l;
}

ChannelRealization generate_channel(const TdlProfile& profile, const ChannelParams& params,
                                    std::uint64_t seed) {
  profile.validate();
  if (params.n_u == 0 || params.n_r == 0) throw InvalidInput("generate_channel: empty antenna/user set");
  if (!(params.sample_rate_hz > 0.0) || !(params.delay_scale > 0.0)) {
    throw InvalidInput("generate_channel: sample rate and delay scale must be positive");
  }
  const auto powers = profile.normalized_powers();
  const auto delays = rounded_delays(profile, params.sample_rate_hz, params.delay_scale);
  const IQMatrix corr = exp_correlation_sqrt(params.rho, params.n_r);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  ChannelRealization ch;
  ch.rho = params.rho;
  ch.sample_rate_hz = params.sample_rate_hz;
  for (std::size_t i = 0; i < powers.size(); ++i) {
    IQMatrix g(params.n_r, params.n_u);
    if (profile.rayleigh) {
      const double sd = std::sqrt(powers[i] / 2.0);
      for (auto& v : g.data()) v = cplx(sd * normal(rng), sd * normal(rng));
      g = matmul(corr, g);
    } else {
      for (auto& v : g.data()) v = std::sqrt(powers[i]);
    }
    if (!ch.taps.empty() && ch.taps.back().delay_samples == delays[i]) {
      ch.taps.back().gains = ch.taps.back().gains + g;
    } else {
      ch.taps.push_back(ChannelTap{delays[i], std::move(g)});
    }
  }
  return ch;
}

IQMatrix apply_channel(std::span<const std::vector<cplx>> x, const ChannelRealization& ch,
                       const NoiseSpec& noise, std::uint64_t seed, std::size_t cp_len) {
  if (ch.taps.empty()) throw InvalidInput("apply_channel: channel has no taps");
  if (x.size() != ch.n_u()) {
    throw InvalidInput("apply_channel: " + std::to_string(x.size()) + " user streams for a " +
                       std::to_string(ch.n_u()) + "-user channel");
  }
  if (!(noise.variance >= 0.0)) throw InvalidInput("apply_channel: negative noise variance");
  const std::size_t n = x.front().size();
  for (const auto& xu : x) {
    if (xu.size() != n) throw InvalidInput("apply_channel: user streams differ in length");
  }
  if (n == 0) throw InvalidInput("apply_channel: empty user stream");
  if (ch.max_delay() >= cp_len) {
    throw ConfigError("tap delay of " + std::to_string(ch.max_delay()) +
                      " samples is not covered by a cyclic prefix of " + std::to_string(cp_len));
  }

  const std::size_t n_r = ch.n_r();
  IQMatrix y(n, n_r);
  for (const auto& tap : ch.taps) {
    for (std::size_t u = 0; u < x.size(); ++u) {
      const auto g = tap.gains.column(u);
      for (std::size_t t = 0; t < n; ++t) {
        const cplx s = x[u][(t + n - tap.delay_samples % n) % n];
        if (s == cplx{}) continue;
        auto row = y.row(t);
        for (std::size_t r = 0; r < n_r; ++r) row[r] += g[r] * s;
      }
    }
  }
  if (noise.variance > 0.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, std::sqrt(noise.variance / 2.0));
    for (auto& v : y.data()) v += cplx(normal(rng), normal(rng));
  }
  return y;
}

std::vector<IQMatrix> freq_response(const ChannelRealization& ch, std::span<const std::size_t> bins,
                                    std::size_t n_fft) {
  if (ch.taps.empty()) throw InvalidInput("freq_response: channel has no taps");
  if (n_fft == 0) throw InvalidInput("freq_response: n_fft must be positive");
  std::vector<IQMatrix> out;
  out.reserve(bins.size());
  for (auto f : bins) {
    IQMatrix h(ch.n_r(), ch.n_u());
    for (const auto& tap : ch.taps) {
      // Reduce the phase argument modulo n_fft before scaling to keep it exact.
      const double turns =
          static_cast<double>((f % n_fft) * (tap.delay_samples % n_fft) % n_fft) / static_cast<double>(n_fft);
      const cplx w = std::polar(1.0, -2.0 * std::numbers::pi * turns);
      auto src = tap.gains.data();
      auto dst = h.data();
      for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i] * w;
    }
    out.push_back(std::move(h));
  }
  return out;
}

}  // namespace fhqr

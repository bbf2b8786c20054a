#include "fhqr/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "fhqr/channel.hpp"
#include "fhqr/error.hpp"

namespace fhqr {

std::string to_string(Compressor c) {
  switch (c) {
    case Compressor::kNone: return "none";
    case Compressor::kQr: return "qr";
    case Compressor::kSvd: return "svd-baseline";
  }
  return "?";
}

Compressor parse_compressor(const std::string& name) {
  if (name == "none") return Compressor::kNone;
  if (name == "qr") return Compressor::kQr;
  if (name == "svd-baseline" || name == "svd") return Compressor::kSvd;
  throw ConfigError("unknown compressor '" + name + "'");
}

std::string LuPolicy::to_string() const {
  if (!rank_relative()) return std::to_string(fixed);
  return rank_multiple == 1 ? "rank" : std::to_string(rank_multiple) + "*rank";
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  T value{};
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end) throw ConfigError("key '" + key + "': cannot parse '" + text + "'");
  return value;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigError("key '" + key + "': expected a boolean, got '" + text + "'");
}

std::vector<double> parse_snr_grid(const std::string& text) {
  std::vector<double> out;
  for (const auto& item : split(text, ',')) {
    const auto parts = split(item, ':');
    if (parts.size() == 1) {
      out.push_back(parse_number<double>("snr_db", parts[0]));
    } else if (parts.size() == 3) {
      const double lo = parse_number<double>("snr_db", parts[0]);
      const double step = parse_number<double>("snr_db", parts[1]);
      const double hi = parse_number<double>("snr_db", parts[2]);
      if (!(step > 0.0) || hi < lo) throw ConfigError("snr_db range '" + item + "' is empty");
      const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
      for (std::size_t i = 0; i < count; ++i) out.push_back(lo + static_cast<double>(i) * step);
    } else {
      throw ConfigError("snr_db entry '" + item + "' must be a value or lo:step:hi");
    }
  }
  return out;
}

}  // namespace

LuPolicy LuPolicy::parse(const std::string& text) {
  LuPolicy p;
  const std::string t = trim(text);
  if (t == "rank") return p;
  if (const auto star = t.find('*'); star != std::string::npos) {
    if (trim(t.substr(star + 1)) != "rank") throw ConfigError("l_u: expected '<k>*rank', got '" + t + "'");
    p.rank_multiple = parse_number<std::size_t>("l_u", trim(t.substr(0, star)));
    if (p.rank_multiple == 0) throw ConfigError("l_u: rank multiple must be positive");
    return p;
  }
  p.fixed = parse_number<std::size_t>("l_u", t);
  if (p.fixed == 0) throw ConfigError("l_u must be positive");
  return p;
}

std::vector<std::size_t> reference_rb_counts(std::size_t users) {
  std::vector<std::size_t> rbs;
  if (users == 8) {
    for (std::size_t r = 26; r <= 40; r += 2) rbs.push_back(r);
  } else if (users == 12) {
    for (std::size_t r = 10; r <= 32; r += 2) rbs.push_back(r);
  } else {
    throw InvalidInput("the reference RB allocation exists for 8 or 12 users, not " + std::to_string(users));
  }
  return rbs;
}

std::vector<UserAllocation> pack_allocations(const std::vector<std::size_t>& rb_counts) {
  std::vector<UserAllocation> out;
  std::size_t next = 0;
  for (std::size_t u = 0; u < rb_counts.size(); ++u) {
    out.push_back(UserAllocation{static_cast<std::uint16_t>(u), next, rb_counts[u]});
    next += rb_counts[u];
  }
  return out;
}

std::vector<UserAllocation> allocate_reference_rbs(std::size_t users) {
  return pack_allocations(reference_rb_counts(users));
}

std::vector<UserAllocation> SimConfig::allocations() const { return pack_allocations(rb_counts); }

void SimConfig::validate() const {
  QamConfig{modulation};
  grid.validate();
  if (n_r == 0) throw ConfigError("n_r must be positive");
  if (rb_counts.empty()) throw ConfigError("at least one user is required");
  if (rb_counts.size() > 65535) throw ConfigError("too many users");
  validate_allocations(allocations(), grid);
  if (!(scs_hz > 0.0) || !(delay_scale > 0.0)) throw ConfigError("scs and delay_scale must be positive");
  if (!(rho >= 0.0 && rho < 1.0)) throw ConfigError("rho must lie in [0, 1)");
  if (quant_bits < 2 || quant_bits > 16) throw ConfigError("quant_bits must lie in [2, 16]");
  if (compressors.empty()) throw ConfigError("no compressor selected");
  if (snr_db.empty()) throw ConfigError("snr_db grid is empty");
  if (trials == 0) throw ConfigError("trials must be at least 1");
  const auto delays = sample_delays(resolve_profile(channel_profile), sample_rate_hz(), delay_scale);
  if (delays.back() >= grid.cp_len) {
    throw ConfigError("channel delay of " + std::to_string(delays.back()) +
                      " samples is not covered by cp_len " + std::to_string(grid.cp_len));
  }
}

SimConfig desk_config() { return SimConfig{}; }

SimConfig table1_config() {
  SimConfig c;
  c.n_r = 256;
  c.grid = GridConfig::centered(4096, 288, 273);
  c.delay_scale = 1.0;
  c.rb_counts = reference_rb_counts(8);
  c.l_u = LuPolicy{24, 1};
  c.snr_db = {0.0};
  c.trials = 1;
  return c;
}

SimConfig parse_config(std::istream& in, SimConfig base) {
  SimConfig c = std::move(base);
  std::optional<std::size_t> users;
  std::optional<std::string> rb_spec;
  std::optional<std::size_t> n_fft, cp_len, max_rbs;
  std::optional<long> first_subcarrier;
  std::map<std::string, int> seen;

  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (seen[key]++ > 0) throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");

    if (key == "modulation") c.modulation = parse_number<int>(key, value);
    else if (key == "n_r") c.n_r = parse_number<std::size_t>(key, value);
    else if (key == "n_fft") n_fft = parse_number<std::size_t>(key, value);
    else if (key == "cp_len") cp_len = parse_number<std::size_t>(key, value);
    else if (key == "max_rbs") max_rbs = parse_number<std::size_t>(key, value);
    else if (key == "first_subcarrier") first_subcarrier = parse_number<long>(key, value);
    else if (key == "scs_khz") c.scs_hz = 1e3 * parse_number<double>(key, value);
    else if (key == "channel") c.channel_profile = value;
    else if (key == "delay_scale") c.delay_scale = parse_number<double>(key, value);
    else if (key == "rho") c.rho = parse_number<double>(key, value);
    else if (key == "users") users = parse_number<std::size_t>(key, value);
    else if (key == "rb_allocation") rb_spec = value;
    else if (key == "power_step_db") c.power_step_db = parse_number<double>(key, value);
    else if (key == "l_u") c.l_u = LuPolicy::parse(value);
    else if (key == "quant_bits") c.quant_bits = parse_number<unsigned>(key, value);
    else if (key == "compressor") {
      c.compressors.clear();
      for (const auto& name : split(value, ',')) c.compressors.push_back(parse_compressor(name));
    } else if (key == "svd_rank") c.svd_rank = value == "auto" ? 0 : parse_number<std::size_t>(key, value);
    else if (key == "snr_db") c.snr_db = parse_snr_grid(value);
    else if (key == "trials") c.trials = parse_number<std::size_t>(key, value);
    else if (key == "seed") c.seed = parse_number<std::uint64_t>(key, value);
    else if (key == "timing") c.timing = parse_bool(key, value);
    else throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
  }

  if (n_fft || cp_len || max_rbs) {
    c.grid = GridConfig::centered(n_fft.value_or(c.grid.n_fft), cp_len.value_or(c.grid.cp_len),
                                  max_rbs.value_or(c.grid.max_rbs));
  }
  if (first_subcarrier) c.grid.first_subcarrier = *first_subcarrier;

  if (rb_spec) {
    if (*rb_spec == "reference") {
      c.rb_counts = reference_rb_counts(users.value_or(c.rb_counts.size()));
    } else {
      std::vector<std::size_t> counts;
      for (const auto& item : split(*rb_spec, ',')) counts.push_back(parse_number<std::size_t>("rb_allocation", item));
      if (counts.size() == 1 && users) counts.assign(*users, counts.front());
      if (users && counts.size() != *users) {
        throw ConfigError("rb_allocation lists " + std::to_string(counts.size()) + " users but users = " +
                          std::to_string(*users));
      }
      c.rb_counts = std::move(counts);
    }
  } else if (users) {
    const bool base_is_reference = (c.rb_counts.size() == 8 || c.rb_counts.size() == 12) &&
                               c.rb_counts == reference_rb_counts(c.rb_counts.size());
    if (base_is_reference && (*users == 8 || *users == 12)) {
      c.rb_counts = reference_rb_counts(*users);
    } else {
      c.rb_counts.assign(*users, c.rb_counts.front());
    }
  }
  c.validate();
  return c;
}

SimConfig load_config(const std::string& path, bool full_scale) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in, full_scale ? table1_config() : desk_config());
}

}  // namespace fhqr

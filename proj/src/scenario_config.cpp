#include "bess/scenario_config.hpp"

#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include "bess/csv.hpp"
#include "bess/errors.hpp"

namespace bess {

namespace pt = boost::property_tree;

namespace {

struct InverterSpec {
  double fixed_fraction = 0.01;
  double charge_slope = 0.0093;
  double discharge_slope = 0.0077;
  std::optional<PwlTable> charge_table;
  std::optional<PwlTable> discharge_table;
};

struct StringSpec {
  StringPlant plant;
  InverterSpec inverter;
  StringInit init{0.5, 25.0, 1.0};
};

class Reader {
 public:
  Reader(std::string origin, std::filesystem::path base) : origin_(std::move(origin)), base_(std::move(base)) {}

  [[noreturn]] void fail(const std::string& section, const std::string& key, const std::string& why) const {
    throw InputError(fmt::format("{}: [{}] {}: {}", origin_, section, key, why), origin_);
  }

  double number(const std::string& section, const std::string& key, const std::string& value) const {
    const std::string v = boost::trim_copy(value);
    try {
      std::size_t used = 0;
      const double d = std::stod(v, &used);
      if (used == v.size()) return d;
    } catch (const std::logic_error&) {
    }
    fail(section, key, fmt::format("'{}' is not a number", v));
  }

  int integer(const std::string& section, const std::string& key, const std::string& value) const {
    const double d = number(section, key, value);
    if (d != static_cast<double>(static_cast<int>(d))) fail(section, key, "expected an integer");
    return static_cast<int>(d);
  }

  PwlTable table(const std::string& section, const std::string& key, const std::string& value) const {
    const std::string v = boost::trim_copy(value);
    try {
      if (boost::iends_with(v, ".csv")) {
        std::filesystem::path p(v);
        if (p.is_relative()) p = base_ / p;
        return load_pwl_csv(p);
      }
      std::vector<std::string> items;
      boost::split(items, v, boost::is_any_of(" ,\t"), boost::token_compress_on);
      std::vector<Breakpoint> pts;
      for (const auto& item : items) {
        if (item.empty()) continue;
        const auto colon = item.find(':');
        if (colon == std::string::npos) fail(section, key, fmt::format("table entry '{}' must be x:y", item));
        pts.push_back({number(section, key, item.substr(0, colon)), number(section, key, item.substr(colon + 1))});
      }
      return PwlTable::build(std::move(pts));
    } catch (const InputError&) {
      throw;
    } catch (const Error& e) {
      fail(section, key, e.what());
    }
  }

  const std::filesystem::path& base() const { return base_; }

 private:
  std::string origin_;
  std::filesystem::path base_;
};

// Applies one per-string key; false if the key is not a per-string key.
bool apply_string_key(const Reader& rd, const std::string& sec, const std::string& key, const std::string& v,
                      StringSpec& s) {
  auto& el = s.plant.electrical;
  auto& th = s.plant.thermal;
  auto& pi = s.plant.controller;
  auto& res = s.plant.resistance;
  auto& inv = s.inverter;
  const std::map<std::string, double*> reals = {
      {"soc", &s.init.soc},
      {"temp_c", &s.init.temp_c},
      {"p_nominal_kw", &el.p_nominal_kw},
      {"q_nominal_ah", &el.q_nominal_ah},
      {"r_temp_max_mohm", &res.r_temp_max_mohm},
      {"soc_threshold", &res.soc_threshold},
      {"eps_soc", &res.eps_soc},
      {"fixed_fraction", &inv.fixed_fraction},
      {"charge_slope", &inv.charge_slope},
      {"discharge_slope", &inv.discharge_slope},
      {"c_total", &th.c_total},
      {"k_cond", &th.k_cond},
      {"h_conv", &th.h_conv},
      {"t_air", &th.t_air},
      {"kp", &pi.kp},
      {"ki", &pi.ki},
      {"t_start", &pi.t_start},
      {"t_stop", &pi.t_stop},
  };
  const std::map<std::string, int*> ints = {
      {"n_series", &el.n_series}, {"n_parallel", &el.n_parallel}, {"n_nodes", &th.n_nodes}};
  const std::map<std::string, PwlTable*> tables = {
      {"ocv_charge", &el.ocv_charge}, {"ocv_discharge", &el.ocv_discharge}, {"r_soc", &res.r_soc},
      {"r_temp", &res.r_temp},         {"lut", &s.plant.derate_lut}};
  if (auto it = reals.find(key); it != reals.end()) {
    *it->second = rd.number(sec, key, v);
    return true;
  }
  if (auto it = ints.find(key); it != ints.end()) {
    *it->second = rd.integer(sec, key, v);
    return true;
  }
  if (auto it = tables.find(key); it != tables.end()) {
    *it->second = rd.table(sec, key, v);
    return true;
  }
  if (key == "charge_table") {
    inv.charge_table = rd.table(sec, key, v);
    return true;
  }
  if (key == "discharge_table") {
    inv.discharge_table = rd.table(sec, key, v);
    return true;
  }
  return false;
}

// Which per-string keys belong to which shared section.
const std::map<std::string, std::set<std::string>>& shared_sections() {
  static const std::map<std::string, std::set<std::string>> m = {
      {"initial", {"soc", "temp_c"}},
      {"electrical", {"p_nominal_kw", "q_nominal_ah", "n_series", "n_parallel", "ocv_charge", "ocv_discharge"}},
      {"resistance", {"r_soc", "r_temp", "r_temp_max_mohm", "soc_threshold", "eps_soc"}},
      {"inverter", {"fixed_fraction", "charge_slope", "discharge_slope", "charge_table", "discharge_table"}},
      {"thermal", {"n_nodes", "c_total", "k_cond", "h_conv", "t_air"}},
      {"derating", {"kp", "ki", "t_start", "t_stop", "lut"}},
  };
  return m;
}

std::size_t objective_index(const Reader& rd, const std::string& sec, const std::string& key) {
  static const std::map<std::string, Objective> names = {{"availability", Objective::Availability},
                                                         {"derating", Objective::Derating},
                                                         {"inverter", Objective::Inverter},
                                                         {"battery", Objective::Battery}};
  auto it = names.find(key);
  if (it == names.end()) rd.fail(sec, key, "unknown objective");
  return static_cast<std::size_t>(it->second);
}

std::string table_text(const PwlTable& t) {
  std::string s;
  for (const auto& bp : t.breakpoints()) {
    if (!s.empty()) s += ' ';
    s += io::fmt_num(bp.x) + ":" + io::fmt_num(bp.y);
  }
  return s;
}

}  // namespace

std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

LoadedScenario parse_scenario(const std::string& text, const std::string& origin,
                              const std::filesystem::path& base_dir) {
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw InputError(fmt::format("{}: line {}: {}", origin, e.line(), e.message()), origin, e.line());
  }
  const Reader rd(origin, base_dir);
  LoadedScenario out;
  ScenarioConfig& cfg = out.config;
  cfg = ScenarioConfig::reference();

  int n_strings = 2;
  if (auto sc = tree.get_child_optional("scenario"))
    if (auto n = sc->get_optional<std::string>("strings")) n_strings = rd.integer("scenario", "strings", *n);
  if (n_strings < 1) rd.fail("scenario", "strings", "must be >= 1");

  // Shared per-string sections first, then [string.N] on top.
  StringSpec shared;
  for (const auto& [sec, keys] : shared_sections()) {
    auto child = tree.get_child_optional(sec);
    if (!child) continue;
    if (sec == "thermal") out.has_thermal_section = true;
    for (const auto& [key, node] : *child) {
      if (!keys.count(key)) rd.fail(sec, key, "unknown key");
      apply_string_key(rd, sec, key, node.data(), shared);
    }
  }
  std::vector<StringSpec> specs(static_cast<std::size_t>(n_strings), shared);

  auto sweep_set = false;
  for (const auto& [sec, node] : tree) {
    if (shared_sections().count(sec)) continue;
    if (boost::starts_with(sec, "string.")) {
      const int idx = rd.integer(sec, "index", sec.substr(7));
      if (idx < 0 || idx >= n_strings) rd.fail(sec, "index", fmt::format("no string {} (have {})", idx, n_strings));
      for (const auto& [key, v] : node)
        if (!apply_string_key(rd, sec, key, v.data(), specs[static_cast<std::size_t>(idx)]))
          rd.fail(sec, key, "unknown key");
      continue;
    }
    for (const auto& [key, v] : node) {
      const std::string& val = v.data();
      if (sec == "scenario") {
        if (key == "strings") continue;
        else if (key == "horizon_steps") cfg.horizon_steps = rd.integer(sec, key, val);
        else if (key == "dt_s") cfg.dt_s = rd.number(sec, key, val);
        else if (key == "apply_steps") cfg.apply_steps = rd.integer(sec, key, val);
        else if (key == "sim_duration") cfg.sim_duration = rd.integer(sec, key, val);
        else if (key == "heat_breakpoints") cfg.heat_breakpoints = rd.integer(sec, key, val);
        else rd.fail(sec, key, "unknown key");
      } else if (sec == "weights") {
        if (key == "slack_penalty") cfg.weights.slack_penalty = rd.number(sec, key, val);
        else if (key == "regularization") cfg.weights.regularization = rd.number(sec, key, val);
        else cfg.weights.weight[objective_index(rd, sec, key)] = rd.number(sec, key, val);
      } else if (sec == "priorities") {
        cfg.weights.priority[objective_index(rd, sec, key)] = rd.integer(sec, key, val);
      } else if (sec == "model") {
        if (key == "big_m_avail_kw") cfg.big_m.avail_kw = rd.number(sec, key, val);
        else if (key == "big_m_inv_kw") cfg.big_m.inv_kw = rd.number(sec, key, val);
        else if (key == "big_m_soc") cfg.big_m.soc = rd.number(sec, key, val);
        else if (key == "eps") cfg.eps.eps = rd.number(sec, key, val);
        else if (key == "eps_inv_kw") cfg.eps.eps_inv_kw = rd.number(sec, key, val);
        else if (key == "eps1") cfg.eps.eps1 = rd.number(sec, key, val);
        else rd.fail(sec, key, "unknown key");
      } else if (sec == "solver") {
        if (key == "slp_max_iters") cfg.slp.max_iters = rd.integer(sec, key, val);
        else if (key == "slp_temp_tol") cfg.slp.temp_tol = rd.number(sec, key, val);
        else if (key == "slp_soc_tol") cfg.slp.soc_tol = rd.number(sec, key, val);
        else if (key == "slp_damping") cfg.slp.damping = rd.number(sec, key, val);
        else if (key == "bnb_max_nodes") cfg.bnb.max_nodes = rd.integer(sec, key, val);
        else if (key == "bnb_gap_tol") cfg.bnb.gap_tol = rd.number(sec, key, val);
        else if (key == "integrality_tol") cfg.bnb.integrality_tol = rd.number(sec, key, val);
        else rd.fail(sec, key, "unknown key");
      } else if (sec == "demand") {
        if (key == "mode") {
          const std::string m = boost::to_lower_copy(boost::trim_copy(val));
          if (m == "direct") cfg.demand.kind = DemandSpec::Kind::Direct;
          else if (m == "arbitrage") cfg.demand.kind = DemandSpec::Kind::Arbitrage;
          else rd.fail(sec, key, "expected 'direct' or 'arbitrage'");
        } else if (key == "arbitrage_fraction") {
          cfg.demand.arbitrage_fraction = rd.number(sec, key, val);
        } else if (key == "price_period_steps") {
          cfg.demand.price_period_steps = rd.integer(sec, key, val);
        } else if (key == "file") {
          std::filesystem::path p(boost::trim_copy(val));
          if (p.is_relative()) p = base_dir / p;
          cfg.demand.values = load_profile_csv(p);
        } else {
          rd.fail(sec, key, "unknown key");
        }
      } else if (sec == "sweep") {
        if (key != "points") rd.fail(sec, key, "unknown key");
        out.sweep = parse_sweep(val);
        sweep_set = true;
      } else {
        throw InputError(fmt::format("{}: unknown section [{}]", origin, sec), origin);
      }
    }
  }
  if (sweep_set && out.sweep.empty()) rd.fail("sweep", "points", "empty sweep list");
  if (cfg.demand.kind == DemandSpec::Kind::Direct && cfg.demand.values.empty())
    rd.fail("demand", "file", "direct mode needs a demand file");

  cfg.strings.clear();
  cfg.initial.clear();
  for (auto& s : specs) {
    const double pn = s.plant.electrical.p_nominal_kw;
    try {
      s.plant.inverter = InverterLossModel::linear(pn, s.inverter.fixed_fraction, s.inverter.charge_slope,
                                                   s.inverter.discharge_slope);
    } catch (const Error& e) {
      throw InputError(fmt::format("{}: [inverter] {}", origin, e.what()), origin);
    }
    if (s.inverter.charge_table) s.plant.inverter.charge = *s.inverter.charge_table;
    if (s.inverter.discharge_table) s.plant.inverter.discharge = *s.inverter.discharge_table;
    cfg.strings.push_back(s.plant);
    cfg.initial.push_back(s.init);
  }
  // Re-derived big-M defaults follow the largest string unless overridden.
  if (!tree.get_optional<std::string>("model.big_m_avail_kw") || !tree.get_optional<std::string>("model.big_m_inv_kw")) {
    double pmax = 0.0;
    for (const auto& s : cfg.strings) pmax = std::max(pmax, s.electrical.p_nominal_kw);
    if (!tree.get_optional<std::string>("model.big_m_avail_kw")) cfg.big_m.avail_kw = pmax;
    if (!tree.get_optional<std::string>("model.big_m_inv_kw")) cfg.big_m.inv_kw = pmax;
  }
  try {
    cfg.validate();
  } catch (const Error& e) {
    throw InputError(fmt::format("{}: {}", origin, e.what()), origin);
  }
  return out;
}

LoadedScenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(fmt::format("cannot open config file {}", path.string()), path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str(), path.string(), path.parent_path());
}

std::string scenario_to_ini(const ScenarioConfig& cfg, const std::vector<SweepPoint>& sweep) {
  using io::fmt_num;
  std::string s;
  auto line = [&](const std::string& k, const std::string& v) { s += k + " = " + v + "\n"; };
  s += "[scenario]\n";
  line("strings", std::to_string(cfg.strings.size()));
  line("horizon_steps", std::to_string(cfg.horizon_steps));
  line("dt_s", fmt_num(cfg.dt_s));
  line("apply_steps", std::to_string(cfg.apply_steps));
  line("sim_duration", std::to_string(cfg.sim_duration));
  line("heat_breakpoints", std::to_string(cfg.heat_breakpoints));

  s += "\n[weights]\n";
  const char* names[] = {"availability", "derating", "inverter", "battery"};
  for (int i = 0; i < kNumObjectives; ++i) line(names[i], fmt_num(cfg.weights.weight[static_cast<std::size_t>(i)]));
  line("slack_penalty", fmt_num(cfg.weights.slack_penalty));
  line("regularization", fmt_num(cfg.weights.regularization));
  s += "\n[priorities]\n";
  for (int i = 0; i < kNumObjectives; ++i)
    line(names[i], std::to_string(cfg.weights.priority[static_cast<std::size_t>(i)]));

  s += "\n[model]\n";
  line("big_m_avail_kw", fmt_num(cfg.big_m.avail_kw));
  line("big_m_inv_kw", fmt_num(cfg.big_m.inv_kw));
  line("big_m_soc", fmt_num(cfg.big_m.soc));
  line("eps", fmt_num(cfg.eps.eps));
  line("eps_inv_kw", fmt_num(cfg.eps.eps_inv_kw));
  line("eps1", fmt_num(cfg.eps.eps1));

  s += "\n[solver]\n";
  line("slp_max_iters", std::to_string(cfg.slp.max_iters));
  line("slp_temp_tol", fmt_num(cfg.slp.temp_tol));
  line("slp_soc_tol", fmt_num(cfg.slp.soc_tol));
  line("slp_damping", fmt_num(cfg.slp.damping));
  line("bnb_max_nodes", std::to_string(cfg.bnb.max_nodes));
  line("bnb_gap_tol", fmt_num(cfg.bnb.gap_tol));
  line("integrality_tol", fmt_num(cfg.bnb.integrality_tol));

  s += "\n[demand]\n";
  line("mode", cfg.demand.kind == DemandSpec::Kind::Direct ? "direct" : "arbitrage");
  line("arbitrage_fraction", fmt_num(cfg.demand.arbitrage_fraction));
  line("price_period_steps", std::to_string(cfg.demand.price_period_steps));
  if (!cfg.demand.values.empty()) {
    std::string v;
    for (double d : cfg.demand.values) v += fmt_num(d) + "\n";
    s += fmt::format("; profile: {} rows, fnv1a {:016x}\n", cfg.demand.values.size(), fnv1a64(v));
  }

  s += "\n[sweep]\n";
  std::string pts;
  for (const auto& p : sweep) {
    if (!pts.empty()) pts += ", ";
    pts += p.label + ":" + fmt_num(p.w_inverter) + ":" + fmt_num(p.w_battery);
  }
  line("points", pts);

  for (std::size_t m = 0; m < cfg.strings.size(); ++m) {
    const auto& p = cfg.strings[m];
    s += fmt::format("\n[string.{}]\n", m);
    line("soc", fmt_num(cfg.initial[m].soc));
    line("temp_c", fmt_num(cfg.initial[m].temp_c));
    line("p_nominal_kw", fmt_num(p.electrical.p_nominal_kw));
    line("q_nominal_ah", fmt_num(p.electrical.q_nominal_ah));
    line("n_series", std::to_string(p.electrical.n_series));
    line("n_parallel", std::to_string(p.electrical.n_parallel));
    line("ocv_charge", table_text(p.electrical.ocv_charge));
    line("ocv_discharge", table_text(p.electrical.ocv_discharge));
    line("r_soc", table_text(p.resistance.r_soc));
    line("r_temp", table_text(p.resistance.r_temp));
    line("r_temp_max_mohm", fmt_num(p.resistance.r_temp_max_mohm));
    line("soc_threshold", fmt_num(p.resistance.soc_threshold));
    line("eps_soc", fmt_num(p.resistance.eps_soc));
    line("charge_table", table_text(p.inverter.charge));
    line("discharge_table", table_text(p.inverter.discharge));
    line("n_nodes", std::to_string(p.thermal.n_nodes));
    line("c_total", fmt_num(p.thermal.c_total));
    line("k_cond", fmt_num(p.thermal.k_cond));
    line("h_conv", fmt_num(p.thermal.h_conv));
    line("t_air", fmt_num(p.thermal.t_air));
    line("kp", fmt_num(p.controller.kp));
    line("ki", fmt_num(p.controller.ki));
    line("t_start", fmt_num(p.controller.t_start));
    line("t_stop", fmt_num(p.controller.t_stop));
    line("lut", table_text(p.derate_lut));
  }
  return s;
}

}  // namespace bess

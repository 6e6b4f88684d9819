#include "ivxboot/io.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace ivxboot::io {

using nlohmann::json;

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json parse_checked(const std::string& text) {
  std::vector<std::set<std::string>> key_stack;
  json::parser_callback_t cb = [&](int, json::parse_event_t event, json& parsed) {
    if (event == json::parse_event_t::object_start) {
      key_stack.emplace_back();
    } else if (event == json::parse_event_t::object_end) {
      key_stack.pop_back();
    } else if (event == json::parse_event_t::key) {
      const auto key = parsed.get<std::string>();
      if (!key_stack.back().insert(key).second)
        throw ConfigError("duplicate key: " + key);
    }
    return true;
  };
  try {
    return json::parse(text, cb);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }
}

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed,
                         const std::string& context) {
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!allowed.count(it.key()))
      throw ConfigError("unknown key" + (context.empty() ? "" : " in " + context) + ": " +
                        it.key());
}

std::vector<double> number_list(const json& v, const std::string& key) {
  std::vector<double> out;
  if (v.is_array()) {
    for (const auto& e : v) {
      if (!e.is_number()) throw ConfigError(key + ": expected numbers");
      out.push_back(e.get<double>());
    }
  } else if (v.is_number()) {
    out.push_back(v.get<double>());
  } else {
    throw ConfigError(key + ": expected a number or an array of numbers");
  }
  if (out.empty()) throw ConfigError(key + ": empty list");
  return out;
}

std::vector<long> integer_list(const json& v, const std::string& key) {
  std::vector<long> out;
  for (double d : number_list(v, key)) {
    const long i = static_cast<long>(d);
    if (static_cast<double>(i) != d) throw ConfigError(key + ": expected integers");
    out.push_back(i);
  }
  return out;
}

stat::StatKind stat_kind_from(const std::string& name) {
  if (name == "wald-ivx") return stat::StatKind::wald_ivx;
  if (name == "t-ivx") return stat::StatKind::t_ivx;
  if (name == "psi-ivx") return stat::StatKind::psi_ivx;
  if (name == "jn-ivx") return stat::StatKind::jn_ivx;
  if (name == "selfnorm-ols") return stat::StatKind::selfnorm_ols;
  if (name == "tn-unitroot") return stat::StatKind::tn_unit_root;
  throw ConfigError("stat: unknown statistic '" + name + "'");
}

std::string stat_kind_name(stat::StatKind kind) {
  switch (kind) {
    case stat::StatKind::wald_ivx: return "wald-ivx";
    case stat::StatKind::t_ivx: return "t-ivx";
    case stat::StatKind::psi_ivx: return "psi-ivx";
    case stat::StatKind::jn_ivx: return "jn-ivx";
    case stat::StatKind::selfnorm_ols: return "selfnorm-ols";
    case stat::StatKind::tn_unit_root: return "tn-unitroot";
  }
  return "?";
}

limit::FunctionalKind functional_from(const std::string& name) {
  if (name == "dfxi") return limit::FunctionalKind::df_xi;
  if (name == "dfratio") return limit::FunctionalKind::df_ratio;
  if (name == "ouratio") return limit::FunctionalKind::ou_ratio;
  if (name == "psigamma") return limit::FunctionalKind::psi_gamma;
  if (name == "mixed-ivx") return limit::FunctionalKind::mixed_gaussian_ivx;
  if (name == "cauchy") return limit::FunctionalKind::explosive_cauchy;
  if (name == "v-over-u") return limit::FunctionalKind::v_over_u;
  throw ConfigError("reference.kind: unknown functional '" + name + "'");
}

std::string functional_name(limit::FunctionalKind kind) {
  switch (kind) {
    case limit::FunctionalKind::df_xi: return "dfxi";
    case limit::FunctionalKind::df_ratio: return "dfratio";
    case limit::FunctionalKind::ou_ratio: return "ouratio";
    case limit::FunctionalKind::psi_gamma: return "psigamma";
    case limit::FunctionalKind::mixed_gaussian_ivx: return "mixed-ivx";
    case limit::FunctionalKind::explosive_cauchy: return "cauchy";
    case limit::FunctionalKind::v_over_u: return "v-over-u";
  }
  return "?";
}

mc::MatchStat match_from(const std::string& name) {
  if (name == "sqrt-n-rho") return mc::MatchStat::sqrt_n_rho;
  if (name == "n-rho") return mc::MatchStat::n_rho;
  if (name == "explosive") return mc::MatchStat::explosive;
  if (name == "psi-ivx") return mc::MatchStat::psi_ivx;
  if (name == "t-ivx") return mc::MatchStat::t_ivx;
  throw ConfigError("match: unknown normalization '" + name + "'");
}

std::string match_name(mc::MatchStat m) {
  switch (m) {
    case mc::MatchStat::sqrt_n_rho: return "sqrt-n-rho";
    case mc::MatchStat::n_rho: return "n-rho";
    case mc::MatchStat::explosive: return "explosive";
    case mc::MatchStat::psi_ivx: return "psi-ivx";
    case mc::MatchStat::t_ivx: return "t-ivx";
  }
  return "?";
}

const std::set<std::string> kTopLevelKeys = {
    "experiment", "n", "c", "rho", "gamma", "beta", "sigma_uv", "rho_u", "sigma_u", "sigma_v",
    "ma_weights", "x0", "local_alternative", "method", "stat", "power_a", "studentize",
    "null_beta", "null_rho", "scheme", "recenter", "block_b", "mu_hat", "sieve_p", "sieve_r",
    "B", "R", "alpha", "seed", "c_z", "gamma_z", "match", "analytic_reference", "reference",
    "m_grid", "K", "fclt_m", "fclt_draws", "fclt_b", "threads"};

const std::set<std::string> kReferenceKeys = {"kind", "N",   "M",        "c",
                                              "gamma", "c_z", "omega_xx", "studentized"};

}  // namespace

mc::ExperimentConfig parse_config_text(const std::string& text) {
  const json j = parse_checked(text);
  if (!j.is_object()) throw ConfigError("configuration must be a JSON object");
  reject_unknown_keys(j, kTopLevelKeys, "");

  mc::ExperimentConfig cfg;
  cfg.experiment = j.value("experiment", std::string("size"));

  if (j.contains("n")) cfg.grid.n = integer_list(j.at("n"), "n");
  for (long n : cfg.grid.n)
    if (n < 4) throw ConfigError("n: sample sizes must be at least 4");
  if (j.contains("c")) cfg.grid.c = number_list(j.at("c"), "c");
  if (j.contains("rho")) cfg.grid.rho = number_list(j.at("rho"), "rho");
  cfg.grid.gamma = j.value("gamma", 1.0);
  if (!(cfg.grid.gamma > 0.0 && cfg.grid.gamma <= 1.0))
    throw ConfigError("gamma: must lie in (0,1]");
  if (j.contains("beta")) cfg.grid.beta = number_list(j.at("beta"), "beta");
  if (j.contains("sigma_uv")) cfg.grid.sigma_uv = number_list(j.at("sigma_uv"), "sigma_uv");
  if (j.contains("rho_u")) cfg.grid.rho_u = number_list(j.at("rho_u"), "rho_u");
  for (double r : cfg.grid.rho_u)
    if (!(r > -1.0 && r < 1.0)) throw ConfigError("rho_u: must lie in (-1,1)");
  cfg.grid.sigma_u = j.value("sigma_u", 1.0);
  cfg.grid.sigma_v = j.value("sigma_v", 1.0);
  if (!(cfg.grid.sigma_u > 0.0)) throw ConfigError("sigma_u: must be positive");
  if (!(cfg.grid.sigma_v > 0.0)) throw ConfigError("sigma_v: must be positive");
  if (j.contains("ma_weights")) {
    const auto w = number_list(j.at("ma_weights"), "ma_weights");
    cfg.grid.ma_weights.resize(static_cast<long>(w.size()));
    for (std::size_t i = 0; i < w.size(); ++i) cfg.grid.ma_weights[static_cast<long>(i)] = w[i];
  }
  cfg.grid.x0 = j.value("x0", 0.0);
  cfg.grid.local_alternative = j.value("local_alternative", false);

  const std::string method = j.value("method", std::string("ivx"));
  if (method == "ols") cfg.method = est::FitMethod::ols;
  else if (method == "ivx") cfg.method = est::FitMethod::ivx;
  else throw ConfigError("method: must be 'ols' or 'ivx'");

  cfg.statistic.kind = stat_kind_from(j.value("stat", std::string("wald-ivx")));
  cfg.statistic.power = j.value("power_a", 1.0);
  if (cfg.statistic.power != 0.5 && cfg.statistic.power != 1.0 && cfg.statistic.power != 2.0)
    throw ConfigError("power_a: must be 0.5, 1 or 2");
  cfg.statistic.studentize = j.value("studentize", false);
  cfg.statistic.null_beta = j.value("null_beta", 0.0);
  cfg.statistic.null_rho = j.value("null_rho", 1.0);

  if (j.contains("scheme") && !j.at("scheme").is_null()) {
    boot::BootstrapScheme scheme;
    const std::string name = j.at("scheme").get<std::string>();
    if (name == "wild") scheme.kind = boot::BootstrapScheme::Kind::wild;
    else if (name == "iid-residual") scheme.kind = boot::BootstrapScheme::Kind::iid_residual;
    else if (name == "residual-block") scheme.kind = boot::BootstrapScheme::Kind::residual_block;
    else if (name == "sieve") scheme.kind = boot::BootstrapScheme::Kind::sieve;
    else throw ConfigError("scheme: unknown scheme '" + name + "'");
    const std::string recenter = j.value("recenter", std::string("null-imposed"));
    if (recenter == "null-imposed")
      scheme.recenter.mode = boot::RecenterPolicy::Mode::null_imposed;
    else if (recenter == "estimate-centered")
      scheme.recenter.mode = boot::RecenterPolicy::Mode::estimate_centered;
    else throw ConfigError("recenter: must be 'null-imposed' or 'estimate-centered'");
    scheme.recenter.beta0 = cfg.statistic.null_beta;
    scheme.block_len = j.value("block_b", 25L);
    if (scheme.block_len < 1) throw ConfigError("block_b: must be positive");
    scheme.mu_hat = j.value("mu_hat", 0.0);
    if (j.contains("sieve_p") && !j.at("sieve_p").is_null()) {
      const long p = j.at("sieve_p").get<long>();
      if (p < 1) throw ConfigError("sieve_p: must be at least 1");
      scheme.sieve_order = p;
    }
    scheme.sieve_burn_in = j.value("sieve_r", 50L);
    if (scheme.sieve_burn_in < 0) throw ConfigError("sieve_r: must be nonnegative");
    cfg.scheme = scheme;
  }

  cfg.b_count = j.value("B", 399L);
  if (cfg.b_count < 1) throw ConfigError("B: must be positive");
  cfg.replications = j.value("R", 1000L);
  if (cfg.replications < 1) throw ConfigError("R: must be positive");
  cfg.alpha = j.value("alpha", 0.05);
  if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) throw ConfigError("alpha: must lie in (0,1)");
  cfg.seed = j.value("seed", static_cast<std::uint64_t>(1));

  cfg.ivx.c_z = j.value("c_z", -1.0);
  cfg.ivx.gamma_z = j.value("gamma_z", 0.95);
  if (!(cfg.ivx.c_z < 0.0)) throw ConfigError("c_z: must be negative");
  if (!(cfg.ivx.gamma_z > 0.0 && cfg.ivx.gamma_z < 1.0))
    throw ConfigError("gamma_z: must lie in (0,1)");

  cfg.match = match_from(j.value("match", std::string("n-rho")));
  const std::string analytic = j.value("analytic_reference", std::string("none"));
  if (analytic == "none") cfg.analytic = mc::AnalyticRef::none;
  else if (analytic == "normal") cfg.analytic = mc::AnalyticRef::std_normal;
  else if (analytic == "cauchy") cfg.analytic = mc::AnalyticRef::std_cauchy;
  else if (analytic == "uniform") cfg.analytic = mc::AnalyticRef::uniform01;
  else throw ConfigError("analytic_reference: unknown value '" + analytic + "'");

  if (j.contains("reference") && !j.at("reference").is_null()) {
    const json& r = j.at("reference");
    if (!r.is_object()) throw ConfigError("reference: must be an object");
    reject_unknown_keys(r, kReferenceKeys, "reference");
    limit::ReferenceSpec spec;
    spec.kind = functional_from(r.value("kind", std::string("dfratio")));
    spec.grid_steps = r.value("N", 2000L);
    spec.draws = r.value("M", 20000L);
    spec.c = r.value("c", 0.0);
    spec.gamma = r.value("gamma", 1.0);
    spec.c_z = r.value("c_z", -1.0);
    spec.omega_xx = r.value("omega_xx", 1.0);
    spec.studentized = r.value("studentized", true);
    spec.validate();
    cfg.reference = spec;
  }

  if (j.contains("m_grid")) cfg.m_grid = integer_list(j.at("m_grid"), "m_grid");
  cfg.block_len = j.value("K", 50L);
  if (cfg.block_len < 1) throw ConfigError("K: must be positive");
  cfg.fclt_steps = j.value("fclt_m", 2000L);
  cfg.fclt_draws = j.value("fclt_draws", 20000L);
  cfg.fclt_block = j.value("fclt_b", 5L);
  cfg.threads = j.value("threads", 0);

  cfg.validate();
  cfg.config_digest = config_digest(cfg);
  return cfg;
}

mc::ExperimentConfig parse_config(const std::string& path) {
  return parse_config_text(slurp(path));
}

std::string config_canonical_json(const mc::ExperimentConfig& cfg) {
  json j;
  j["experiment"] = cfg.experiment;
  j["n"] = cfg.grid.n;
  j["c"] = cfg.grid.c;
  if (!cfg.grid.rho.empty()) j["rho"] = cfg.grid.rho;
  j["gamma"] = cfg.grid.gamma;
  j["beta"] = cfg.grid.beta;
  j["sigma_uv"] = cfg.grid.sigma_uv;
  j["rho_u"] = cfg.grid.rho_u;
  j["sigma_u"] = cfg.grid.sigma_u;
  j["sigma_v"] = cfg.grid.sigma_v;
  j["ma_weights"] = std::vector<double>(cfg.grid.ma_weights.data(),
                                        cfg.grid.ma_weights.data() + cfg.grid.ma_weights.size());
  j["x0"] = cfg.grid.x0;
  j["local_alternative"] = cfg.grid.local_alternative;
  j["method"] = cfg.method == est::FitMethod::ivx ? "ivx" : "ols";
  j["stat"] = stat_kind_name(cfg.statistic.kind);
  j["power_a"] = cfg.statistic.power;
  j["studentize"] = cfg.statistic.studentize;
  j["null_beta"] = cfg.statistic.null_beta;
  j["null_rho"] = cfg.statistic.null_rho;
  if (cfg.scheme) {
    switch (cfg.scheme->kind) {
      case boot::BootstrapScheme::Kind::wild: j["scheme"] = "wild"; break;
      case boot::BootstrapScheme::Kind::iid_residual: j["scheme"] = "iid-residual"; break;
      case boot::BootstrapScheme::Kind::residual_block: j["scheme"] = "residual-block"; break;
      case boot::BootstrapScheme::Kind::sieve: j["scheme"] = "sieve"; break;
    }
    j["recenter"] = cfg.scheme->recenter.mode == boot::RecenterPolicy::Mode::null_imposed
                        ? "null-imposed"
                        : "estimate-centered";
    j["block_b"] = cfg.scheme->block_len;
    j["mu_hat"] = cfg.scheme->mu_hat;
    if (cfg.scheme->sieve_order) j["sieve_p"] = *cfg.scheme->sieve_order;
    j["sieve_r"] = cfg.scheme->sieve_burn_in;
  }
  j["B"] = cfg.b_count;
  j["R"] = cfg.replications;
  j["alpha"] = cfg.alpha;
  j["seed"] = cfg.seed;
  j["c_z"] = cfg.ivx.c_z;
  j["gamma_z"] = cfg.ivx.gamma_z;
  j["match"] = match_name(cfg.match);
  if (cfg.reference) {
    json r;
    r["kind"] = functional_name(cfg.reference->kind);
    r["N"] = cfg.reference->grid_steps;
    r["M"] = cfg.reference->draws;
    r["c"] = cfg.reference->c;
    r["gamma"] = cfg.reference->gamma;
    r["c_z"] = cfg.reference->c_z;
    r["omega_xx"] = cfg.reference->omega_xx;
    r["studentized"] = cfg.reference->studentized;
    j["reference"] = r;
  }
  if (!cfg.m_grid.empty()) j["m_grid"] = cfg.m_grid;
  j["K"] = cfg.block_len;
  return j.dump();
}

std::uint64_t config_digest(const mc::ExperimentConfig& cfg) {
  const std::string payload = config_canonical_json(cfg);
  std::uint64_t h = 0xcbf29ce484222325ull;  // FNV-1a over the canonical dump
  for (unsigned char ch : payload) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  return h;
}

namespace {

json report_to_json(const mc::ExperimentReport& report) {
  json j;
  json manifest;
  manifest["config_digest"] = report.config_digest;
  manifest["seed"] = report.seed;
  manifest["generator"] = report.generator;
  manifest["version"] = kArtifactVersion;
  manifest["deterministic"] = true;
  j["manifest"] = manifest;
  j["experiment"] = report.experiment;

  json cells = json::array();
  for (const auto& c : report.cells) {
    json cell;
    cell["cell_id"] = c.cell_id;
    cell["n"] = c.n;
    cell["c"] = c.c;
    cell["gamma"] = c.gamma;
    cell["beta"] = c.beta;
    cell["sigma_uv"] = c.sigma_uv;
    cell["rho_u"] = c.rho_u;
    cell["method"] = c.method;
    cell["scheme"] = c.scheme;
    cells.push_back(cell);
  }
  j["cells"] = cells;

  json rows = json::array();
  for (const auto& r : report.rows)
    rows.push_back({r.cell_id, r.rep, r.estimate, r.statistic, r.pvalue, r.reject});
  j["rows"] = rows;

  json aggregates = json::array();
  for (const auto& a : report.aggregates) {
    json agg;
    agg["cell_id"] = a.cell_id;
    agg["rejection_rate"] = a.rejection_rate;
    agg["se"] = a.se;
    agg["ks"] = a.ks;
    agg["excluded"] = a.excluded;
    agg["extra"] = a.extra;
    aggregates.push_back(agg);
  }
  j["aggregates"] = aggregates;
  j["summary"] = report.summary;
  return j;
}

}  // namespace

void write_report_json(const mc::ExperimentReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write file: " + path);
  out << report_to_json(report).dump(2) << "\n";
}

mc::ExperimentReport read_report_json(const std::string& path) {
  const json j = parse_checked(slurp(path));
  mc::ExperimentReport report;
  report.experiment = j.at("experiment").get<std::string>();
  report.config_digest = j.at("manifest").at("config_digest").get<std::uint64_t>();
  report.seed = j.at("manifest").at("seed").get<std::uint64_t>();
  report.generator = j.at("manifest").at("generator").get<std::string>();
  for (const auto& cell : j.at("cells")) {
    mc::CellInfo c;
    c.cell_id = cell.at("cell_id").get<long>();
    c.n = cell.at("n").get<long>();
    c.c = cell.at("c").get<double>();
    c.gamma = cell.at("gamma").get<double>();
    c.beta = cell.at("beta").get<double>();
    c.sigma_uv = cell.at("sigma_uv").get<double>();
    c.rho_u = cell.at("rho_u").get<double>();
    c.method = cell.at("method").get<std::string>();
    c.scheme = cell.at("scheme").get<std::string>();
    report.cells.push_back(std::move(c));
  }
  for (const auto& row : j.at("rows")) {
    mc::RepRow r;
    r.cell_id = row.at(0).get<long>();
    r.rep = row.at(1).get<long>();
    r.estimate = row.at(2).get<double>();
    r.statistic = row.at(3).get<double>();
    r.pvalue = row.at(4).get<double>();
    r.reject = row.at(5).get<int>();
    report.rows.push_back(r);
  }
  for (const auto& agg : j.at("aggregates")) {
    mc::CellSummary a;
    a.cell_id = agg.at("cell_id").get<long>();
    a.rejection_rate = agg.at("rejection_rate").get<double>();
    a.se = agg.at("se").get<double>();
    a.ks = agg.at("ks").get<double>();
    a.excluded = agg.at("excluded").get<long>();
    a.extra = agg.at("extra").get<std::map<std::string, double>>();
    report.aggregates.push_back(std::move(a));
  }
  report.summary = j.at("summary").get<std::map<std::string, double>>();
  return report;
}

bool reports_equal(const mc::ExperimentReport& a, const mc::ExperimentReport& b) {
  return report_to_json(a) == report_to_json(b);
}

void write_report_csv(const mc::ExperimentReport& report, const std::string& rows_path,
                      const std::string& aggregates_path) {
  std::ofstream rows(rows_path);
  if (!rows) throw ConfigError("cannot write file: " + rows_path);
  rows << "experiment,cell_id,n,c,gamma,beta,sigma_uv,rho_u,method,scheme,rep,estimate,"
          "statistic,pvalue,reject\n";
  for (const auto& r : report.rows) {
    const auto& cell = report.cells.at(static_cast<std::size_t>(r.cell_id));
    rows << report.experiment << ',' << r.cell_id << ',' << cell.n << ',' << fmt(cell.c) << ','
         << fmt(cell.gamma) << ',' << fmt(cell.beta) << ',' << fmt(cell.sigma_uv) << ','
         << fmt(cell.rho_u) << ',' << cell.method << ',' << cell.scheme << ',' << r.rep << ','
         << fmt(r.estimate) << ',' << fmt(r.statistic) << ',' << fmt(r.pvalue) << ',' << r.reject
         << '\n';
  }
  std::ofstream agg(aggregates_path);
  if (!agg) throw ConfigError("cannot write file: " + aggregates_path);
  agg << "cell_id,rejection_rate,se,ks,excluded\n";
  for (const auto& a : report.aggregates)
    agg << a.cell_id << ',' << fmt(a.rejection_rate) << ',' << fmt(a.se) << ',' << fmt(a.ks)
        << ',' << a.excluded << '\n';
}

void write_report(const mc::ExperimentReport& report, const std::string& path_prefix,
                  ReportFormat format) {
  if (format == ReportFormat::json) {
    write_report_json(report, path_prefix + ".json");
    return;
  }
  write_report_csv(report, path_prefix + "_rows.csv", path_prefix + "_cells.csv");
}

void write_pair_csv(const dgp::TimeSeriesPair& pair, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write file: " + path);
  out << "# x0=" << fmt(pair.x0) << "\n";
  out << "y,x\n";
  for (long t = 0; t < pair.y.size(); ++t) out << fmt(pair.y[t]) << ',' << fmt(pair.x[t]) << '\n';
}

dgp::TimeSeriesPair read_pair_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open file: " + path);
  dgp::TimeSeriesPair pair;
  pair.x0 = 0.0;
  std::vector<double> ys;
  std::vector<double> xs;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto pos = line.find("x0=");
      if (pos != std::string::npos) pair.x0 = std::strtod(line.c_str() + pos + 3, nullptr);
      continue;
    }
    if (!header_seen && line.find_first_not_of("yx, \r") == std::string::npos) {
      header_seen = true;
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ConfigError("pair CSV: expected two columns");
    char* end = nullptr;
    const double y = std::strtod(line.c_str(), &end);
    const double x = std::strtod(line.c_str() + comma + 1, &end);
    ys.push_back(y);
    xs.push_back(x);
  }
  if (ys.empty()) throw ConfigError("pair CSV: no data rows");
  pair.y = Eigen::Map<Eigen::ArrayXd>(ys.data(), static_cast<long>(ys.size()));
  pair.x = Eigen::Map<Eigen::ArrayXd>(xs.data(), static_cast<long>(xs.size()));
  return pair;
}

void write_quantile_table(const EmpiricalDistribution& dist, const std::string& path) {
  static const double levels[] = {0.001, 0.005, 0.01, 0.025, 0.05, 0.1,  0.2,  0.3,
                                  0.4,   0.5,   0.6,  0.7,   0.8,  0.9,  0.95, 0.975,
                                  0.99,  0.995, 0.999};
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write file: " + path);
  out << "q,value\n";
  for (double q : levels) out << fmt(q) << ',' << fmt(dist.quantile(q)) << '\n';
}

}  // namespace ivxboot::io

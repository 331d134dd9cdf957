#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "georank/core.hpp"
#include "georank/csv.hpp"
#include "georank/enumerate.hpp"
#include "georank/estimator.hpp"
#include "georank/ingest.hpp"
#include "georank/oracle.hpp"
#include "georank/ranking.hpp"

namespace {

using json = nlohmann::json;
using namespace georank;

// Thrown after the error list has already been printed.
struct CliExit {
  int code;
};

void print_errors(const std::vector<std::string>& errors) {
  json j;
  j["errors"] = errors;
  std::cerr << j.dump() << "\n";
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "' for reading");
  return in;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot open '" + path + "' for writing");
  return out;
}

std::vector<std::string> split_names(const std::string& list) {
  std::vector<std::string> names;
  std::string_view rest = list;
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    std::string_view token = rest.substr(0, comma);
    while (!token.empty() && token.front() == ' ') token.remove_prefix(1);
    while (!token.empty() && token.back() == ' ') token.remove_suffix(1);
    if (!token.empty()) names.emplace_back(token);
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  return names;
}

EstimatorVariant parse_estimator(const std::string& name) {
  if (name == "detailed") return EstimatorVariant::ModSmartDetailed;
  if (name == "simple") return EstimatorVariant::ModSmartSimple;
  throw InputError("unknown estimator '" + name + "' (expected detailed or simple)");
}

AcceptTiming parse_accept_timing(const std::string& name) {
  if (name == "sender") return AcceptTiming::SenderBased;
  if (name == "literal") return AcceptTiming::PaperLiteral;
  throw InputError("unknown accept timing '" + name + "' (expected sender or literal)");
}

void require_valid(const SiteCatalog& catalog, const RttMatrix& m, const ClientSet& clients,
                   const ProtocolParams& params) {
  const auto errors = validate_inputs(catalog, m, clients, params);
  if (!errors.empty()) {
    print_errors(errors);
    throw CliExit{1};
  }
}

struct IngestArgs {
  std::string samples;
  std::string out;
  bool trim = false;
};

int run_ingest(const IngestArgs& args) {
  auto in = open_input(args.samples);
  const auto samples = parse_samples(in);
  const SiteCatalog catalog = catalog_from_samples(samples);
  AggregateOptions options;
  options.trimmed = args.trim;
  const RttMatrix matrix = aggregate(samples, catalog, options);
  auto out = open_output(args.out);
  store_matrix(out, catalog, matrix);
  std::cout << "sites: " << catalog.size() << "\n";
  std::cout << "matrix: " << args.out << "\n";
  return 0;
}

struct EnumerateArgs {
  std::string matrix;
  std::string candidates;
  std::uint32_t size = 0;
  std::uint32_t n = 4;
  bool leaderless = false;
  bool count_only = false;
  std::string out;
};

DeploymentSpace make_space(const SiteCatalog& catalog, const std::string& candidates,
                           std::uint32_t n, DeploymentMode mode) {
  if (candidates.empty()) {
    return DeploymentSpace::over_all_sites(catalog, n, mode);
  }
  std::vector<SiteId> allowed;
  for (const auto& name : split_names(candidates)) {
    allowed.push_back(catalog.require(name));
  }
  return DeploymentSpace(catalog, std::move(allowed), n, mode);
}

int run_enumerate(const EnumerateArgs& args) {
  SiteCatalog catalog;
  if (!args.matrix.empty()) {
    auto in = open_input(args.matrix);
    catalog = load_matrix(in).first;
  } else if (args.size > 0) {
    std::vector<std::string> names;
    names.reserve(args.size);
    for (std::uint32_t i = 0; i < args.size; ++i) names.push_back("s" + std::to_string(i));
    catalog = SiteCatalog(std::move(names));
  } else {
    throw InputError("enumerate needs --matrix or --size");
  }

  const auto mode = args.leaderless ? DeploymentMode::Leaderless : DeploymentMode::LeaderBased;
  const DeploymentSpace space = make_space(catalog, args.candidates, args.n, mode);

  if (args.count_only) {
    std::cout << space.count() << "\n";
    return 0;
  }

  std::ofstream file;
  std::ostream* out = &std::cout;
  if (!args.out.empty()) {
    file = open_output(args.out);
    out = &file;
  }
  DeploymentCursor cursor = space.cursor();
  Deployment d = Deployment::leaderless({0});
  while (cursor.next(d)) {
    *out << d.to_string(space.catalog()) << "\n";
  }
  return 0;
}

struct EstimateArgs {
  std::string matrix;
  std::string deployment;
  std::string clients;
  std::uint32_t f = 1;
  std::string estimator = "detailed";
  std::string accept_timing = "sender";
  bool cft = false;
  bool verbose = false;
  bool oracle = false;
};

int run_estimate(const EstimateArgs& args) {
  auto in = open_input(args.matrix);
  auto [catalog, matrix] = load_matrix(in);
  const Deployment deployment = Deployment::parse(args.deployment, catalog);
  const ClientSet clients = ClientSet::parse(args.clients, catalog);

  ProtocolParams params;
  params.n = static_cast<std::uint32_t>(deployment.size());
  params.f = args.f;
  params.fault_model = args.cft ? FaultModel::Cft : FaultModel::Bft;
  params.variant = parse_estimator(args.estimator);
  params.accept_timing = parse_accept_timing(args.accept_timing);
  require_valid(catalog, matrix, clients, params);

  double oracle_latency = 0.0;
  if (args.oracle) {
    oracle_latency = simulate(deployment, clients, matrix, params).latency_ms;
  }

  if (params.variant == EstimatorVariant::ModSmartSimple) {
    const double latency = estimate_simple(deployment, clients, matrix);
    if (args.verbose) {
      json j;
      j["latency_ms"] = latency;
      if (args.oracle) j["oracle_latency_ms"] = oracle_latency;
      std::cout << j.dump(2) << "\n";
    } else {
      std::cout << "latency_ms=" << csv::format_double(latency) << "\n";
      if (args.oracle) std::cout << "oracle_latency_ms=" << csv::format_double(oracle_latency) << "\n";
    }
    return 0;
  }

  const DetailedEstimate estimate = estimate_detailed(deployment, clients, matrix, params);
  if (args.verbose) {
    json j;
    j["latency_ms"] = estimate.latency_ms;
    j["s_req"] = estimate.trace.s_req;
    j["s_pro"] = estimate.trace.s_pro;
    j["s_wrt"] = estimate.trace.s_wrt;
    j["s_acc"] = estimate.trace.s_acc;
    json response = json::object();
    for (const auto& [site, time] : estimate.trace.response) {
      response[catalog.name(site)] = time;
    }
    j["response"] = response;
    if (args.oracle) j["oracle_latency_ms"] = oracle_latency;
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "latency_ms=" << csv::format_double(estimate.latency_ms) << "\n";
    if (args.oracle) std::cout << "oracle_latency_ms=" << csv::format_double(oracle_latency) << "\n";
  }
  return 0;
}

struct RankArgs {
  std::string matrix;
  std::string clients;
  std::string out;
  std::string candidates;
  std::string config;
  std::uint32_t n = 4;
  std::uint32_t f = 1;
  std::string estimator = "detailed";
  std::string accept_timing = "sender";
  bool cft = false;
  unsigned workers = 1;
};

int run_rank(const RankArgs& args) {
  auto in = open_input(args.matrix);
  auto [catalog, matrix] = load_matrix(in);
  const ClientSet clients = ClientSet::parse(args.clients, catalog);

  ProtocolParams params;
  params.n = args.n;
  params.f = args.f;
  params.fault_model = args.cft ? FaultModel::Cft : FaultModel::Bft;
  params.variant = parse_estimator(args.estimator);
  params.accept_timing = parse_accept_timing(args.accept_timing);
  require_valid(catalog, matrix, clients, params);

  const DeploymentSpace space =
      make_space(catalog, args.candidates, args.n, DeploymentMode::LeaderBased);

  RankTimings timings;
  const Ranking ranking =
      rank(space, clients, matrix, params, params.variant, std::max(1u, args.workers), &timings);

  const auto write_start = std::chrono::steady_clock::now();
  {
    auto out = open_output(args.out);
    store_ranking(out, ranking);
  }
  const double write_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - write_start).count();

  std::cout << "deployments: " << ranking.size() << "\n";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3f", timings.evaluate_seconds);
  std::cout << "evaluate_seconds: " << buf << "\n";
  std::snprintf(buf, sizeof(buf), "%.3f", timings.sort_seconds + write_seconds);
  std::cout << "sort_output_seconds: " << buf << "\n";
  std::cout << "best: " << ranking.best().deployment.to_string(ranking.catalog()) << "\n";
  std::cout << "best_latency_ms: " << csv::format_double(ranking.best().latency_ms) << "\n";
  return 0;
}

struct CompareArgs {
  std::string estimated;
  std::string reference;
  std::string scatter;
  bool verbose = false;
};

int run_compare(const CompareArgs& args) {
  auto est_in = open_input(args.estimated);
  const Ranking estimated = load_reference(est_in);
  auto ref_in = open_input(args.reference);
  const Ranking reference = load_reference(ref_in);

  const RankingComparison comparison = compare(estimated, reference);
  std::cout << "rmse=" << csv::format_double(comparison.rmse) << "\n";
  std::cout << "cc=" << csv::format_double(comparison.cc) << "\n";

  if (args.verbose) {
    // Correlation of the raw latencies, matched by deployment identity.
    std::map<std::string, double> est_latency;
    for (const auto& e : estimated.entries()) {
      est_latency.emplace(e.deployment.to_string(estimated.catalog()), e.latency_ms);
    }
    std::vector<double> xs, ys;
    xs.reserve(reference.size());
    ys.reserve(reference.size());
    for (const auto& e : reference.entries()) {
      xs.push_back(est_latency.at(e.deployment.to_string(reference.catalog())));
      ys.push_back(e.latency_ms);
    }
    std::cout << "cc_latency=" << csv::format_double(pearson(xs, ys)) << "\n";
  }

  if (!args.scatter.empty()) {
    auto out = open_output(args.scatter);
    store_scatter(out, comparison);
  }
  return 0;
}

void apply_config(RankArgs& args, const CLI::App* sub) {
  if (args.config.empty()) return;
  auto in = open_input(args.config);
  json cfg;
  try {
    in >> cfg;
  } catch (const json::exception& e) {
    throw InputError("config '" + args.config + "' is not valid json: " + e.what());
  }
  auto flag_absent = [&](const std::string& flag) {
    return sub->get_option(flag)->count() == 0;
  };
  auto get_string = [&](const char* key, std::string& target, const std::string& flag) {
    if (cfg.contains(key) && flag_absent(flag)) target = cfg.at(key).get<std::string>();
  };
  get_string("matrix", args.matrix, "--matrix");
  get_string("clients", args.clients, "--clients");
  get_string("out", args.out, "--out");
  get_string("estimator", args.estimator, "--estimator");
  get_string("accept_timing", args.accept_timing, "--accept-timing");
  if (cfg.contains("n") && flag_absent("--n")) args.n = cfg.at("n").get<std::uint32_t>();
  if (cfg.contains("f") && flag_absent("--f")) args.f = cfg.at("f").get<std::uint32_t>();
  if (cfg.contains("cft") && flag_absent("--cft")) args.cft = cfg.at("cft").get<bool>();
  if (cfg.contains("workers") && flag_absent("--workers")) {
    args.workers = cfg.at("workers").get<unsigned>();
  }
  if (cfg.contains("candidates") && flag_absent("--candidates")) {
    const auto& c = cfg.at("candidates");
    if (c.is_array()) {
      std::string joined;
      for (const auto& name : c) {
        if (!joined.empty()) joined += ',';
        joined += name.get<std::string>();
      }
      args.candidates = joined;
    } else {
      args.candidates = c.get<std::string>();
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Enumerate, estimate, and rank replica deployments for geographic SMR"};
  app.require_subcommand(1);

  IngestArgs ingest_args;
  auto* ingest_cmd = app.add_subcommand(
      "ingest", "Aggregate rtt samples into a mean rtt matrix");
  ingest_cmd->add_option("--samples", ingest_args.samples, "sample csv (src,dst,timestamp,rtt_ms)")
      ->required();
  ingest_cmd->add_option("--out", ingest_args.out, "output matrix csv")->required();
  ingest_cmd->add_flag("--trim", ingest_args.trim, "drop top/bottom 10% of samples per pair");

  EnumerateArgs enum_args;
  auto* enum_cmd = app.add_subcommand("enumerate", "List or count candidate deployments");
  enum_cmd->add_option("--matrix", enum_args.matrix, "matrix csv providing the site catalog");
  enum_cmd->add_option("--size", enum_args.size, "abstract catalog size instead of a matrix");
  enum_cmd->add_option("--candidates", enum_args.candidates, "replica candidate sites (names, comma-separated)");
  enum_cmd->add_option("--n", enum_args.n, "replica count")->required();
  enum_cmd->add_flag("--leaderless", enum_args.leaderless, "deployments are plain site sets");
  enum_cmd->add_flag("--count", enum_args.count_only, "print only |DC|");
  enum_cmd->add_option("--out", enum_args.out, "write deployments to a file instead of stdout");

  EstimateArgs est_args;
  auto* est_cmd = app.add_subcommand("estimate", "Estimate the latency of one deployment");
  est_cmd->add_option("--matrix", est_args.matrix, "matrix csv")->required();
  est_cmd->add_option("--deployment", est_args.deployment, "canonical form Leader|F1,F2,F3")
      ->required();
  est_cmd->add_option("--clients", est_args.clients, "client spec name:count,...")->required();
  est_cmd->add_option("--f", est_args.f, "fault bound (default 1)");
  est_cmd->add_option("--estimator", est_args.estimator, "detailed|simple")
      ->check(CLI::IsMember({"detailed", "simple"}));
  est_cmd->add_option("--accept-timing", est_args.accept_timing, "sender|literal")
      ->check(CLI::IsMember({"sender", "literal"}));
  est_cmd->add_flag("--cft", est_args.cft, "crash fault tolerance bound n >= 2f+1");
  est_cmd->add_flag("--verbose", est_args.verbose, "print the full phase trace as json");
  est_cmd->add_flag("--oracle", est_args.oracle, "also run the discrete-event simulation");

  RankArgs rank_args;
  auto* rank_cmd = app.add_subcommand("rank", "Rank every candidate deployment by latency");
  rank_cmd->add_option("--matrix", rank_args.matrix, "matrix csv");
  rank_cmd->add_option("--clients", rank_args.clients, "client spec name:count,...");
  rank_cmd->add_option("--out", rank_args.out, "output ranking csv");
  rank_cmd->add_option("--candidates", rank_args.candidates, "replica candidate sites");
  rank_cmd->add_option("--config", rank_args.config, "json config; explicit flags win");
  rank_cmd->add_option("--n", rank_args.n, "replica count (default 4)");
  rank_cmd->add_option("--f", rank_args.f, "fault bound (default 1)");
  rank_cmd->add_option("--estimator", rank_args.estimator, "detailed|simple")
      ->check(CLI::IsMember({"detailed", "simple"}));
  rank_cmd->add_option("--accept-timing", rank_args.accept_timing, "sender|literal")
      ->check(CLI::IsMember({"sender", "literal"}));
  rank_cmd->add_flag("--cft", rank_args.cft, "crash fault tolerance bound n >= 2f+1");
  rank_cmd->add_option("--workers", rank_args.workers, "evaluation threads (default 1)");

  CompareArgs cmp_args;
  auto* cmp_cmd = app.add_subcommand("compare", "Compare two rankings (rank rmse and cc)");
  cmp_cmd->add_option("--estimated", cmp_args.estimated, "estimated ranking csv")->required();
  cmp_cmd->add_option("--reference", cmp_args.reference,
                      "reference ranking/latency/raw-sample csv")
      ->required();
  cmp_cmd->add_option("--scatter", cmp_args.scatter, "write rank-vs-rank scatter csv");
  cmp_cmd->add_flag("--verbose", cmp_args.verbose, "also print raw-latency correlation");

  try {
    app.parse(argc, argv);

    if (ingest_cmd->parsed()) return run_ingest(ingest_args);
    if (enum_cmd->parsed()) return run_enumerate(enum_args);
    if (est_cmd->parsed()) return run_estimate(est_args);
    if (rank_cmd->parsed()) {
      apply_config(rank_args, rank_cmd);
      if (rank_args.matrix.empty()) throw InputError("rank needs --matrix (flag or config)");
      if (rank_args.clients.empty()) throw InputError("rank needs --clients (flag or config)");
      if (rank_args.out.empty()) throw InputError("rank needs --out (flag or config)");
      return run_rank(rank_args);
    }
    if (cmp_cmd->parsed()) return run_compare(cmp_args);
    return 1;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const CliExit& e) {
    return e.code;
  } catch (const InputError& e) {
    print_errors({e.what()});
    return 1;
  } catch (const std::exception& e) {
    print_errors({std::string("internal: ") + e.what()});
    return 2;
  }
}

// histent: entanglement-entropy analysis of price histories.
//
// Exit codes: 0 success, 1 selfcheck failure, 2 usage or data error,
// 3 numerical error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "histent/histent.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitSelfcheck = 1;
constexpr int kExitData = 2;
constexpr int kExitNumerical = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct AnalyzeArgs {
  std::string input;
  std::string date_column = "Date";
  std::string value_column = "Open";
  double sigma_r = 1.0;
  bool log_prices = false;
  std::vector<double> qs = {1.0, 2.0};
  std::string window = "full";
  std::size_t stride = 0;  // 0 = pick by qs
  std::string reference;
  std::string reference_column = "Close";
  std::string reference_agg = "mean";
  std::string indicator = "N_E";
  std::string format;
  std::string output;
  std::size_t head = 15;
  bool extremal = false;
  std::size_t threads = 0;
  bool log_approx = false;
};

// Relative paths that do not exist here are looked up under $HISTENT_DATA_DIR.
fs::path resolve_data_path(const std::string& p) {
  fs::path path(p);
  if (path.is_absolute() || fs::exists(path)) return path;
  if (const char* dir = std::getenv("HISTENT_DATA_DIR"); dir && *dir) {
    fs::path candidate = fs::path(dir) / path;
    if (fs::exists(candidate)) return candidate;
  }
  return path;
}

histent::WindowSpec parse_window(const std::string& w) {
  if (w == "month") return histent::WindowSpec::month();
  if (w == "week") return histent::WindowSpec::week();
  if (w.rfind("fixed:", 0) == 0) {
    const std::string n = w.substr(6);
    std::size_t k = 0;
    try {
      std::size_t used = 0;
      k = std::stoul(n, &used);
      if (used != n.size()) throw std::invalid_argument(n);
    } catch (const std::exception&) {
      throw UsageError("bad window size in '" + w + "'");
    }
    if (k == 0) throw UsageError("fixed window size must be >= 1");
    return histent::WindowSpec::fixed(k);
  }
  throw UsageError("unknown window '" + w + "' (expected full, month, week or fixed:k)");
}

histent::Aggregation parse_aggregation(const std::string& a) {
  if (a == "mean") return histent::Aggregation::Mean;
  if (a == "first") return histent::Aggregation::First;
  if (a == "last") return histent::Aggregation::Last;
  if (a == "max") return histent::Aggregation::Max;
  throw UsageError("unknown aggregation '" + a + "'");
}

double indicator_value(const histent::AnalysisRecord& r, const std::string& name) {
  if (name == "N_E") return r.n_effective;
  if (name.rfind("E_", 0) == 0) {
    for (const auto& [q, e] : r.entropies)
      if (histent::order_key(q) == name.substr(2)) return e.value;
  }
  throw UsageError("indicator '" + name + "' is not among the computed columns");
}

std::string embedding_mode_name(histent::EmbeddingMode m) {
  return m == histent::EmbeddingMode::LogPrice ? "log-price" : "raw";
}

int run_analyze(const AnalyzeArgs& args) {
  const bool full = args.window == "full";
  std::optional<histent::WindowSpec> spec;
  if (!full) spec = parse_window(args.window);

  std::string format = args.format;
  const bool needs_envelope = !args.reference.empty() || args.extremal;
  if (format.empty()) format = needs_envelope ? "json" : "csv";
  if (format != "csv" && format != "json") throw UsageError("format must be csv or json");
  if (needs_envelope && format == "csv")
    throw UsageError("--reference and --extremal results need --format json");
  if (!args.reference.empty() && (full || spec->kind == histent::WindowSpec::Kind::FixedCount))
    throw UsageError("--reference requires --window month or --window week");
  if (args.extremal && full) throw UsageError("--extremal requires a window mode");
  if (!(args.sigma_r > 0.0)) throw UsageError("--sigma-r must be positive");
  if (args.head == 0) throw UsageError("--head must be >= 1");

  std::set<double> unique_qs(args.qs.begin(), args.qs.end());
  histent::AnalysisOptions opt;
  opt.qs.assign(unique_qs.begin(), unique_qs.end());
  opt.sigma_unit = 1.0;
  opt.embedding.sigma = args.sigma_r * opt.sigma_unit;
  opt.embedding.mode = args.log_prices ? histent::EmbeddingMode::LogPrice : histent::EmbeddingMode::Raw;
  opt.spectrum_head = args.head;
  opt.retain_full_spectrum = args.extremal;
  opt.log_fluctuation_approx = args.log_approx;
  opt.threads = args.threads;
  opt.stride = args.stride ? args.stride : (opt.purity_only() ? 1 : 10);

  const fs::path input = resolve_data_path(args.input);
  const histent::ColumnSchema schema{args.date_column, args.value_column, {"", "null"}};
  const histent::ParsedSeries parsed = histent::load_price_csv(input, schema);
  const histent::PriceSeries& series = parsed.series;
  if (series.empty()) throw histent::Error(histent::ErrorCode::EmptySeries, "no usable rows in input");
  if (parsed.skipped_rows > 0)
    std::cerr << "histent: warning: skipped " << parsed.skipped_rows << " row(s) with null values\n";

  // Soft caps on real trading calendars; holidays vary, so this only warns.
  std::vector<std::string> oversized;
  if (spec && spec->kind != histent::WindowSpec::Kind::FixedCount) {
    const std::size_t cap = spec->kind == histent::WindowSpec::Kind::TradingWeek ? 5 : 23;
    for (const auto& w : histent::partition(series, *spec))
      if (w.points.size() > cap) oversized.push_back(w.label);
    if (!oversized.empty())
      std::cerr << "histent: warning: " << oversized.size() << " window(s) exceed " << cap << " points\n";
  }

  std::vector<histent::AnalysisRecord> records =
      full ? histent::cumulative_analysis(series, opt) : histent::window_analysis(series, *spec, opt);

  ordered_json meta;
  meta["command"] = "analyze";
  meta["input"] = input.string();
  meta["date_column"] = args.date_column;
  meta["value_column"] = args.value_column;
  meta["rows"] = series.size();
  meta["skipped_rows"] = parsed.skipped_rows;
  meta["mode"] = full ? "cumulative" : "window";
  meta["window"] = full ? std::string("full") : spec->describe();
  meta["week_convention"] = "ISO-8601 weeks (Monday start, labelled by the year of their Thursday)";
  meta["month_convention"] = "calendar month of the trading date";
  meta["embedding"] = {{"mode", embedding_mode_name(opt.embedding.mode)},
                       {"sigma_r", args.sigma_r},
                       {"sigma_unit", opt.sigma_unit},
                       {"sigma", opt.embedding.sigma},
                       {"reference_price", args.log_prices ? "first price of each history" : "none"},
                       {"log_base", "bits"}};
  meta["qs"] = opt.qs;
  if (full) {
    meta["stride"] = opt.stride;
    meta["regime_stepwise"] = opt.stride == 1;
  }
  if (!oversized.empty()) meta["oversized_windows"] = oversized;
  meta["spectrum_head"] = opt.spectrum_head;
  meta["tolerances"] = {{"clamp_factor", opt.embedding.tol.clamp_factor},
                        {"majorization", opt.embedding.tol.majorization},
                        {"regime", opt.embedding.tol.regime},
                        {"saturation", opt.saturation_tol}};
  meta["n_effective_source"] = opt.purity_only() ? "renyi2" : "von_neumann";
  meta["e2_approx"] = !args.log_approx ? "none"
                      : args.log_prices ? "log_fluctuation"
                                        : "variance";

  if (args.extremal) meta["extremal"] = histent::to_json(histent::find_extremal_windows(records));

  if (!args.reference.empty()) {
    const fs::path ref_path = resolve_data_path(args.reference);
    const histent::ColumnSchema ref_schema{args.date_column, args.reference_column, {"", "null"}};
    const histent::PriceSeries ref = histent::load_price_csv(ref_path, ref_schema).series;
    std::vector<histent::LabeledValue> indicator;
    for (const auto& r : records) indicator.push_back({r.label, indicator_value(r, args.indicator)});
    const auto reference = histent::aggregate(ref, *spec, parse_aggregation(args.reference_agg));
    ordered_json cmp = histent::to_json(histent::compare_to_reference(indicator, reference));
    cmp["reference"] = ref_path.string();
    cmp["reference_column"] = args.reference_column;
    cmp["aggregation"] = args.reference_agg;
    cmp["indicator"] = args.indicator;
    meta["comparison"] = std::move(cmp);
  }

  // Render fully before touching the sink so failures never leave partial output.
  std::ostringstream buffer;
  histent::emit(records, format == "csv" ? histent::ReportFormat::Csv : histent::ReportFormat::Json,
                buffer, meta, opt.spectrum_head);
  if (args.output.empty() || args.output == "-") {
    std::cout << buffer.str();
    std::cout.flush();
    if (!std::cout) throw histent::Error(histent::ErrorCode::IoFailure, "write to stdout failed");
  } else {
    std::ofstream out(args.output, std::ios::binary);
    if (!out) throw histent::Error(histent::ErrorCode::IoFailure, "cannot open " + args.output);
    out << buffer.str();
    out.close();
    if (!out) throw histent::Error(histent::ErrorCode::IoFailure, "write to " + args.output + " failed");
  }
  return kExitOk;
}

int run_selfcheck(const std::string& fault) {
  histent::EigenSolverFn solver = [](const histent::Matrix& a, bool v) { return histent::eigh(a, v); };
  if (fault == "eigensolver") {
    solver = [](const histent::Matrix& a, bool v) {
      histent::SymmetricEigen e = histent::eigh(a, v);
      if (v && !e.vectors.empty()) e.vectors(0, 0) += 1e-3;
      return e;
    };
  } else if (!fault.empty()) {
    throw UsageError("unknown fault '" + fault + "'");
  }
  const histent::SelfcheckReport report = histent::run_selfcheck(solver);
  histent::print_selfcheck(report, std::cout);
  return report.all_passed() ? kExitOk : kExitSelfcheck;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Entanglement-entropy analysis of price histories"};
  app.set_version_flag("--version", std::string(histent::kVersion));
  app.require_subcommand(1);

  AnalyzeArgs a;
  auto* analyze = app.add_subcommand("analyze", "Analyze a price series read from CSV");
  analyze->add_option("--input,-i", a.input, "Input CSV (relative paths also searched in $HISTENT_DATA_DIR)")
      ->required();
  analyze->add_option("--date-column", a.date_column, "Date column name")->capture_default_str();
  analyze->add_option("--value-column", a.value_column, "Price column name")->capture_default_str();
  analyze->add_option("--sigma-r", a.sigma_r, "Coherent-state width in units of sigma_0 = 1 price unit")
      ->capture_default_str();
  analyze->add_flag("--log-prices", a.log_prices, "Embed log(p/p0) instead of p");
  analyze->add_option("--q", a.qs, "Renyi orders (1 = von Neumann); repeatable")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  analyze->add_option("--window", a.window, "full | month | week | fixed:k")->capture_default_str();
  analyze->add_option("--stride", a.stride, "Prefix stride for --window full (default 10, or 1 for q = 2 only)")
      ->check(CLI::PositiveNumber);
  analyze->add_option("--reference", a.reference, "Reference index CSV to compare against");
  analyze->add_option("--reference-column", a.reference_column, "Reference value column")->capture_default_str();
  analyze->add_option("--reference-agg", a.reference_agg, "mean | first | last | max")->capture_default_str();
  analyze->add_option("--indicator", a.indicator, "Compared column: N_E or E_<q>")->capture_default_str();
  analyze->add_option("--format", a.format, "csv | json (default csv, json with --reference/--extremal)");
  analyze->add_option("--output,-o", a.output, "Output file (default stdout)");
  analyze->add_option("--head", a.head, "Number of leading eigenvalues reported")->capture_default_str();
  analyze->add_flag("--extremal", a.extremal, "Report the universal max/min-entropy windows");
  analyze->add_option("--threads", a.threads, "Worker threads (0 = all cores)")->capture_default_str();
  analyze->add_flag("--log-approx", a.log_approx, "Add the analytic E2 approximation column (nats)");

  std::string fault;
  auto* selfcheck = app.add_subcommand("selfcheck", "Run the embedded property fixtures");
  selfcheck->add_option("--inject-fault", fault)->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitData;
  }

  try {
    if (*selfcheck) return run_selfcheck(fault);
    return run_analyze(a);
  } catch (const UsageError& e) {
    std::cerr << "histent: usage: " << e.what() << '\n';
    return kExitData;
  } catch (const histent::Error& e) {
    std::cerr << "histent: " << e.what() << '\n';
    return histent::is_numerical(e.code()) ? kExitNumerical : kExitData;
  } catch (const std::exception& e) {
    std::cerr << "histent: " << e.what() << '\n';
    return kExitData;
  }
}

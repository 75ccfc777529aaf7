#include "twistlab/cli.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>

#include "commands.hpp"
#include "twistlab/errors.hpp"

namespace twistlab::cli {

namespace {

enum class Conv { Text, Int, Num, Element, Matrix, Model, Cocycle, Rep, RepList, Bool };

struct FlagSpec {
  std::string flag;
  std::string key;
  Conv conv;
  std::string help;
};

const std::map<std::string, std::vector<FlagSpec>>& flag_table() {
  static const std::map<std::string, std::vector<FlagSpec>> t{
      {"check-cocycle",
       {{"--cocycle", "cocycle", Conv::Cocycle, "pauli | matrix:<a,b;c,d> | bilinear:<D> | trivial | JSON descriptor"},
        {"--samples", "samples", Conv::Int, "sampled triples and pairs for infinite groups"},
        {"--radius", "radius", Conv::Int, "coordinate bound for samples"}}},
      {"folner",
       {{"--rank", "rank", Conv::Int, "N"},
        {"--side", "side", Conv::Int, "m"},
        {"--offset", "offset", Conv::Element, "box offset, e.g. 0,0"},
        {"--x", "x", Conv::Element, "translation, e.g. 1,0"}}},
      {"converge",
       {{"--mode", "mode", Conv::Text, "theorem33 | product | star"},
        {"--matrix", "matrix", Conv::Matrix, "base matrix A, rows separated by ';'"},
        {"--norms", "norms", Conv::Model, "model for |A_i|_inf"},
        {"--sides", "sides", Conv::Model, "model for the box sides m_i"},
        {"--x", "x", Conv::Element, "group element"},
        {"--n-max", "n_max", Conv::Int, "series horizon"},
        {"--budget", "point_budget", Conv::Int, "box points evaluated exactly"},
        {"--phases", "phases", Conv::Model, "product mode: z_i = exp(i s_i)"},
        {"--defects", "defects", Conv::Model, "star mode: inner products 1 - s_i"},
        {"--tail", "tail", Conv::Model, "declared tail model for the terms"}}},
      {"select",
       {{"--matrix", "matrix", Conv::Matrix, "A; members are u_{r^j A}"},
        {"--ratio", "ratio", Conv::Num, "r"},
        {"--sides", "sides", Conv::Model, "model for the box sides"},
        {"--count", "count", Conv::Int, "number of members to select"},
        {"--horizon", "scan_horizon", Conv::Int, "largest index scanned"},
        {"--x", "x", Conv::Element, "element for the post-selection check"}}},
      {"prop42",
       {{"--m", "m", Conv::Model, "box side model"},
        {"--a", "a", Conv::Model, "matrix norm model"},
        {"--x", "x", Conv::Element, "optional group element"},
        {"--n-max", "n_max", Conv::Int, "series horizon"}}},
      {"dirichlet",
       {{"--n", "n", Conv::Int, "n for a single value"},
        {"--theta", "theta", Conv::Num, "theta for a single value"},
        {"--n-model", "n_model", Conv::Model, "model for n_j"},
        {"--theta-model", "theta_model", Conv::Model, "model for theta_j"},
        {"--n-max", "n_max", Conv::Int, "series horizon"}}},
      {"ccr",
       {{"--left", "left", Conv::Text, "group A"},
        {"--right", "right", Conv::Text, "group B"},
        {"--exponents", "exponents", Conv::Matrix, "integer matrix E: sigma = exp(2 pi i a.Eb/n)"},
        {"--denominator", "denominator", Conv::Int, "n"},
        {"--matrix", "matrix", Conv::Matrix, "lattice D: sigma = exp(i a.Db)"},
        {"--window", "window", Conv::Int, "window side for B = Z^Q"},
        {"--samples", "samples", Conv::Int, "sampled pairs"},
        {"--radius", "radius", Conv::Int, "coordinate bound for samples"}}},
      {"fell",
       {{"--cocycle", "cocycle", Conv::Cocycle, "u"},
        {"--rep", "rep", Conv::Rep, "pauli | trivial | character:<angles> | regular:<cocycle> | JSON"},
        {"--cap", "cap", Conv::Int, "dimension cap"}}},
      {"tensor",
       {{"--factors", "factors", Conv::RepList, "representations separated by '/', e.g. pauli/pauli"},
        {"--cap", "cap", Conv::Int, "dimension cap"},
        {"--samples", "samples", Conv::Int, "sampled pairs for infinite groups"},
        {"--radius", "radius", Conv::Int, "coordinate bound for samples"}}},
      {"action",
       {{"--source", "source", Conv::Text, "twisted-trace | pauli-trace | regular-box | raw"},
        {"--cocycle", "cocycle", Conv::Cocycle, "twisted-trace: the cocycle u_i = u"},
        {"--matrix", "matrix", Conv::Matrix, "regular-box: A with u_i = u_{r^i A}"},
        {"--ratio", "ratio", Conv::Num, "regular-box: r"},
        {"--sides", "sides", Conv::Model, "regular-box: box side model"},
        {"--tail", "tail", Conv::Model, "declared tail model for every query"},
        {"--n-max", "n_max", Conv::Int, "series horizon"}}},
      {"obstruction",
       {{"--cocycle", "cocycle", Conv::Cocycle, "reference cocycle u"},
        {"--count", "count", Conv::Int, "number of copies u_i = u when no classes are given"}}},
  };
  return t;
}

Json cocycle_from_text(const std::string& text, const std::string& group) {
  if (!text.empty() && text.front() == '{') return Json::parse(text);
  if (text == "pauli") return Json{{"variant", "pauli"}};
  if (text == "trivial") return Json{{"variant", "trivial"}, {"group", group.empty() ? "Z" : group}};
  if (text.rfind("matrix:", 0) == 0) return Json{{"variant", "matrix"}, {"matrix", matrix_from_text(text.substr(7))}};
  if (text.rfind("bilinear:", 0) == 0) return Json{{"variant", "bilinear"}, {"matrix", matrix_from_text(text.substr(9))}};
  throw ValidationError("unknown cocycle '" + text + "'");
}

Json rep_from_text(const std::string& text, const std::string& group) {
  if (!text.empty() && text.front() == '{') return Json::parse(text);
  if (text == "pauli") return Json{{"kind", "pauli"}};
  if (text == "trivial") return Json{{"kind", "trivial"}, {"group", group.empty() ? "Z2" : group}};
  if (text.rfind("character:", 0) == 0) {
    return Json{{"kind", "character"}, {"group", group.empty() ? "Z2" : group}, {"angles", number_list_from_text(text.substr(10))}};
  }
  if (text.rfind("regular:", 0) == 0) return Json{{"kind", "regular"}, {"cocycle", cocycle_from_text(text.substr(8), group)}};
  throw ValidationError("unknown representation '" + text + "'");
}

Json convert(const FlagSpec& spec, const std::string& value, const std::string& group) {
  switch (spec.conv) {
    case Conv::Text: return value;
    case Conv::Int: {
      try {
        std::size_t used = 0;
        const long long v = std::stoll(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
      } catch (const std::exception&) {
        throw ValidationError(spec.flag + " expects an integer, got '" + value + "'");
      }
    }
    case Conv::Num: {
      try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
      } catch (const std::exception&) {
        throw ValidationError(spec.flag + " expects a number, got '" + value + "'");
      }
    }
    case Conv::Element: return element_from_text(value);
    case Conv::Matrix: return matrix_from_text(value);
    case Conv::Model: return model_json(TailModel::parse(value));
    case Conv::Cocycle: return cocycle_from_text(value, group);
    case Conv::Rep: return rep_from_text(value, group);
    case Conv::RepList: {
      Json list = Json::array();
      std::stringstream ss(value);
      std::string item;
      while (std::getline(ss, item, '/')) list.push_back(rep_from_text(item, group));
      return list;
    }
    case Conv::Bool: return value == "true";
  }
  return value;
}

Json load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read scenario file '" + path + "'");
  Json j = Json::parse(in);
  // a full report re-runs from its embedded scenario
  if (j.is_object() && j.contains("scenario") && j.contains("result")) return j.at("scenario");
  return j;
}

std::string csv_text(const Report& report) {
  std::ostringstream os;
  const bool many = report.tables.size() > 1;
  for (const auto& [name, series] : report.tables) {
    if (many) os << "# " << name << '\n';
    os << "index,term,partial_sum,bound\n";
    for (const auto& row : series.rows) {
      os << row.index << ',' << format_double(row.term) << ',' << format_double(row.partial_sum) << ',' << format_double(row.bound) << '\n';
    }
  }
  std::string s = os.str();
  // CSV carries inf unquoted
  std::string out;
  for (char c : s) {
    if (c != '"') out.push_back(c);
  }
  return out;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"twistlab: cocycles, twisted representations and infinite tensor product diagnostics"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  struct Options {
    std::string scenario_path, output, format, group, seed;
    std::vector<std::string> queries;
    bool value_only = false;
    std::map<std::string, std::string> values;
  };
  auto opts = std::make_shared<Options>();

  std::map<std::string, CLI::App*> subs;
  for (const auto& name : command_names()) {
    CLI::App* sub = app.add_subcommand(name, "run the " + name + " diagnostic");
    sub->add_option("--scenario", opts->scenario_path, "scenario JSON file (or a previous report)");
    sub->add_option("--output", opts->output, "write the report to this path");
    sub->add_option("--format", opts->format, "json | csv | value");
    sub->add_option("--seed", opts->seed, "seed for sampled checks");
    if (name != "prop42" && name != "dirichlet" && name != "select" && name != "converge" && name != "folner") {
      sub->add_option("--group", opts->group, "group, e.g. Z^2 or Z2xZ2");
    }
    if (name == "dirichlet") sub->add_flag("--value-only", opts->value_only, "print only the value");
    if (name == "action") sub->add_option("--query", opts->queries, "query element, repeatable");
    for (const auto& spec : flag_table().at(name)) {
      sub->add_option(spec.flag, opts->values[name + spec.flag], spec.help);
    }
    subs[name] = sub;
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    // subcommand help requests land here too
    if (e.get_exit_code() == 0) {
      for (auto* sub : app.get_subcommands()) out << sub->help();
      return 0;
    }
    err << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    const std::string command = app.get_subcommands().front()->get_name();
    CLI::App* sub = subs.at(command);
    Json scenario = Json::object();
    if (!opts->scenario_path.empty()) {
      scenario = load_scenario(opts->scenario_path);
      if (!scenario.is_object()) throw ValidationError("scenario must be a JSON object");
      if (scenario.contains("command") && scenario["command"] != command) {
        throw ValidationError("scenario is for '" + scenario["command"].get<std::string>() + "', not '" + command + "'");
      }
    }
    scenario["schema"] = scenario.value("schema", 1);
    scenario["command"] = command;
    if (!opts->seed.empty()) scenario["seed"] = convert({"--seed", "seed", Conv::Int, ""}, opts->seed, "");
    if (!opts->format.empty()) scenario["format"] = opts->format;
    if (opts->value_only) scenario["format"] = "value";
    if (!opts->group.empty()) {
      const std::string g = AbelianGroup::parse(opts->group).to_string();
      if (command == "action" || command == "check-cocycle" || command == "fell" || command == "tensor" || command == "obstruction") {
        scenario["group"] = g;
      }
    }
    for (const auto& spec : flag_table().at(command)) {
      if (sub->count(spec.flag) == 0) continue;
      scenario[spec.key] = convert(spec, opts->values[command + spec.flag], opts->group);
    }
    if (!opts->queries.empty()) {
      Json q = Json::array();
      for (const auto& s : opts->queries) q.push_back(element_from_text(s));
      scenario["queries"] = q;
    }

    const Report report = execute(scenario);
    std::string text;
    if (report.format == "csv") {
      text = csv_text(report);
    } else if (report.format == "value") {
      text = format_double(*report.value) + "\n";
    } else {
      text = dump(report.document) + "\n";
    }
    if (!opts->output.empty()) {
      std::ofstream file(opts->output, std::ios::binary);
      if (!file) throw ValidationError("cannot write '" + opts->output + "'");
      file << text;
    } else {
      out << text;
    }
    if (report.failed) {
      err << "error: " << report.document["result"].value("failure", Json::object()).value("message", std::string("command failed")) << '\n';
      return 2;
    }
    return 0;
  } catch (const Json::exception& e) {
    err << "error: malformed JSON: " << e.what() << '\n';
    return 2;
  } catch (const OverflowError& e) {
    err << "error: overflow: " << e.what() << '\n';
    return 2;
  } catch (const CapExceeded& e) {
    err << "error: cap exceeded: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace twistlab::cli

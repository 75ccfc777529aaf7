#include <doctest.h>

#include <algorithm>
#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>
#include <sys/wait.h>

#include "twistlab/cli.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Outcome {
  int code = -1;
  std::string out;
  std::string err;
};

Outcome run_in_process(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  Outcome o;
  o.code = twistlab::cli::run(args, out, err);
  o.out = out.str();
  o.err = err.str();
  return o;
}

// Runs the real binary through the shell; stderr is discarded.
Outcome run_binary(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + (env.empty() ? "" : " ") + std::string(TWISTLAB_BINARY) + " " + args + " 2>/dev/null";
  Outcome o;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) o.out.append(buf.data(), n);
  const int status = pclose(pipe);
  o.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return o;
}

std::vector<fs::path> example_files() {
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(TWISTLAB_EXAMPLES))
    if (e.path().extension() == ".json") out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

std::string command_of(const fs::path& p) {
  std::ifstream in(p);
  return json::parse(in).at("command").get<std::string>();
}

fs::path temp_file(const std::string& name, const std::string& content) {
  const fs::path p = fs::temp_directory_path() / ("twistlab_test_" + name);
  std::ofstream(p, std::ios::binary) << content;
  return p;
}

}  // namespace

TEST_CASE("every subcommand has an example scenario") {
  std::set<std::string> seen;
  for (const auto& p : example_files()) seen.insert(command_of(p));
  for (const char* name : {"check-cocycle", "folner", "converge", "select", "prop42", "dirichlet", "ccr", "fell", "tensor", "action", "obstruction"}) CHECK_MESSAGE(seen.count(name) == 1, name);
}

TEST_CASE("reports are byte-identical across runs and thread counts") {
  for (const auto& p : example_files()) {
    const std::string args = command_of(p) + " --scenario " + p.string();
    const Outcome a = run_binary(args), b = run_binary(args), c = run_binary(args, "TWISTLAB_THREADS=1"),
                  d = run_binary(args, "TWISTLAB_THREADS=3");
    CHECK_MESSAGE(a.code == 0, p);
    CHECK_MESSAGE(!a.out.empty(), p);
    CHECK_MESSAGE(a.out == b.out, p);
    CHECK_MESSAGE(a.out == c.out, p);
    CHECK_MESSAGE(a.out == d.out, p);
  }
}

TEST_CASE("reports re-run from their embedded scenario") {
  for (const auto& p : example_files()) {
    const std::string cmd = command_of(p);
    const Outcome first = run_in_process({cmd, "--scenario", p.string()});
    REQUIRE(first.code == 0);
    const json report = json::parse(first.out);
    CHECK(report.at("schema") == 1);
    CHECK(report.at("command") == cmd);
    const fs::path saved = temp_file(cmd + "_report.json", first.out);
    const Outcome again = run_in_process({cmd, "--scenario", saved.string()});
    CHECK_MESSAGE(again.code == 0, p);
    CHECK_MESSAGE(again.out == first.out, p);
    // the bare resolved scenario works too
    const fs::path bare = temp_file(cmd + "_scenario.json", report.at("scenario").dump());
    CHECK_MESSAGE(run_in_process({cmd, "--scenario", bare.string()}).out == first.out, p);
  }
}

TEST_CASE("documented command-line examples") {
  const Outcome p = run_in_process({"prop42", "--m", "power:c=1,p=2", "--a", "geometric:c=3.14159,r=0.5", "--x", "1,0"});
  REQUIRE(p.code == 0);
  const json r = json::parse(p.out).at("result");
  for (const char* clause : {"f_sequence", "sigma_f", "product_cocycle", "tensor_product"}) CHECK(r.at(clause).at("status") == "Certified");
  CHECK(r.at("all_certified") == true);

  const Outcome d = run_in_process({"dirichlet", "--n", "1", "--theta", "1.5707963", "--value-only"});
  REQUIRE(d.code == 0);
  CHECK(std::abs(std::stod(d.out) - 1.0 / 3.0) < 1e-6);

  const Outcome o = run_in_process({"obstruction", "--group", "Z2xZ2", "--cocycle", "pauli"});
  REQUIRE(o.code == 0);
  const json obs = json::parse(o.out).at("result");
  CHECK(obs.at("verdict") == "Obstructed");
  CHECK(obs.at("witness") == json::parse("[[1,0],[0,1]]"));
}

TEST_CASE("flags override scenario fields") {
  const fs::path p = fs::path(TWISTLAB_EXAMPLES) / "dirichlet.json";
  const Outcome o = run_in_process({"dirichlet", "--scenario", p.string(), "--n-max", "50"});
  REQUIRE(o.code == 0);
  CHECK(json::parse(o.out).at("scenario").at("n_max") == 50);

  const Outcome q = run_in_process({"action", "--source", "pauli-trace", "--query", "1,1", "--query", "0,0"});
  REQUIRE(q.code == 0);
  const json res = json::parse(q.out).at("result");
  CHECK(res.at("verdict") == "OuterCertified");
  CHECK(res.at("queries").size() == 2);
}

TEST_CASE("validation errors exit with code 2") {
  const fs::path bad_json = temp_file("bad.json", "{\"schema\": 1, \"command\": \"folner\",");
  Outcome o = run_in_process({"folner", "--scenario", bad_json.string()});
  CHECK(o.code == 2);
  CHECK(o.err.find("malformed JSON") != std::string::npos);

  const fs::path unknown = temp_file("unknown.json", R"({"schema": 1, "command": "folner", "sidez": 3})");
  o = run_in_process({"folner", "--scenario", unknown.string()});
  CHECK(o.code == 2);
  CHECK(o.err.find("sidez") != std::string::npos);

  const fs::path schema2 = temp_file("schema2.json", R"({"schema": 2, "command": "folner"})");
  o = run_in_process({"folner", "--scenario", schema2.string()});
  CHECK(o.code == 2);
  CHECK(o.err.find("schema") != std::string::npos);

  const fs::path cap = temp_file("cap.json", R"({"schema": 1, "command": "tensor", "factors": [{"kind": "pauli"}, {"kind": "pauli"}], "cap": 3})");
  o = run_in_process({"tensor", "--scenario", cap.string()});
  CHECK(o.code == 2);
  CHECK(o.err.find("cap exceeded") != std::string::npos);

  const fs::path wrong = temp_file("wrong.json", R"({"schema": 1, "command": "fell"})");
  o = run_in_process({"folner", "--scenario", wrong.string()});
  CHECK(o.code == 2);

  CHECK(run_in_process({"no-such-command"}).code == 2);
  CHECK(run_in_process({"folner", "--format", "xml"}).code == 2);
  CHECK(run_in_process({"folner", "--format", "csv"}).code == 2);
  CHECK(run_in_process({"dirichlet", "--n", "-1", "--theta", "0.1"}).code == 2);
  CHECK(run_in_process({"check-cocycle", "--cocycle", "matrix:1,2;3"}).code == 2);
  CHECK(run_in_process({"fell", "--group", "Z^2"}).code == 2);
}

TEST_CASE("selection failure still writes a report") {
  const Outcome o = run_in_process({"select", "--ratio", "1", "--count", "2", "--horizon", "20"});
  CHECK(o.code == 2);
  const json r = json::parse(o.out).at("result");
  CHECK(r.at("status") == "failed");
  CHECK(r.at("failure").at("step") == 1);
}

TEST_CASE("csv output and output files") {
  const fs::path out = fs::temp_directory_path() / "twistlab_test_conv.csv";
  const Outcome o = run_in_process({"converge", "--mode", "product", "--n-max", "5", "--format", "csv", "--output", out.string()});
  REQUIRE(o.code == 0);
  CHECK(o.out.empty());
  std::ifstream in(out);
  std::string header, row;
  std::getline(in, header);
  CHECK(header == "index,term,partial_sum,bound");
  int rows = 0;
  while (std::getline(in, row)) ++rows;
  CHECK(rows == 5);

  const Outcome many = run_in_process({"converge", "--n-max", "3", "--format", "csv"});
  REQUIRE(many.code == 0);
  CHECK(many.out.find("# sigma_part\nindex,term,partial_sum,bound\n") == 0);
  CHECK(many.out.find("# cocycle_part") != std::string::npos);
}

TEST_CASE("help exits cleanly") {
  const Outcome o = run_in_process({"--help"});
  CHECK(o.code == 0);
  CHECK(o.out.find("obstruction") != std::string::npos);
}

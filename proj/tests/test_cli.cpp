#include <sys/wait.h>

#include <cstdlib>
#include <sstream>

#include "support.hpp"
#include "thh/cli.hpp"

using namespace thh;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "thh");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(int(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("compute emits the documented CSV", "[cli]") {
  const auto r = run_cli({"compute", "--model", "thh-z", "--prime", "2", "--max-degree", "8", "--format", "csv"});
  REQUIRE(r.code == cli::ok);
  CHECK(r.out ==
        "degree,free_rank,torsion_exponents\n0,1,\n1,0,\n2,0,\n3,0,1\n4,0,\n5,0,\n6,0,\n7,0,2\n8,0,\n");
}

TEST_CASE("an empty window has one row", "[cli]") {
  const auto r = run_cli({"compute", "--model", "thh-ell", "--max-degree", "0"});
  REQUIRE(r.code == cli::ok);
  const auto rows = parse_json_rows(r.out);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0] == DegreeRecord{0, AbelianGroup::free(1)});
}

TEST_CASE("JSON and CSV round-trip to direct realization", "[cli]") {
  for (const auto& model : cli::model_names()) {
    INFO(model);
    const auto direct = records_from(realize_range(cli::make_model(model, Prime(3), 60), 60));
    const auto js = run_cli({"compute", "--model", model, "--prime", "3", "--max-degree", "60"});
    REQUIRE(js.code == cli::ok);
    CHECK(parse_json_rows(js.out) == direct);
    const auto csv = run_cli({"--format", "csv", "compute", "--model", model, "--prime", "3", "--max-degree", "60"});
    REQUIRE(csv.code == cli::ok);
    CHECK(parse_csv_rows(csv.out) == direct);
  }
}

TEST_CASE("malformed tables are rejected", "[cli]") {
  CHECK_THROWS_AS(parse_json_rows("{"), ParseError);
  CHECK_THROWS_AS(parse_json_rows(R"([{"degree": 1}])"), ParseError);
  CHECK_THROWS_AS(parse_json_rows(R"([{"degree": 1, "free_rank": 0, "torsion_exponents": [0]}])"), ParseError);
  CHECK_THROWS_AS(parse_csv_rows("degree,free_rank,torsion_exponents\n1,x,\n"), ParseError);
  CHECK_THROWS_AS(parse_csv_rows("1,0\n"), ParseError);
  CHECK(parse_csv_rows("3,0,1;2\n") == DegreeTableRows{{3, AbelianGroup(0, {1, 2})}});
}

TEST_CASE("closed form and spectral sequence agree through the CLI", "[cli]") {
  const auto closed = run_cli({"compute", "--model", "thh-bp2-bp1", "--max-degree", "20"});
  const auto brun = run_cli({"brun", "--n", "2", "--max-degree", "20"});
  REQUIRE(closed.code == cli::ok);
  REQUIRE(brun.code == cli::ok);
  CHECK(parse_json_rows(closed.out) == parse_json_rows(brun.out));
  const auto j = nlohmann::json::parse(brun.out);
  REQUIRE(j.at("extensions").is_array());
  REQUIRE_FALSE(j.at("extensions").empty());
  const auto& first = j.at("extensions").at(0);
  CHECK(first.at("source") == "v0b(1,0,0)");
  CHECK(first.at("target") == "λ1·σv2");
  CHECK(first.at("p_power") == 1);
}

TEST_CASE("brun options", "[cli]") {
  const auto csv = run_cli({"brun", "--n", "0", "--prime", "3", "--max-degree", "12", "--emit", "csv", "--log-extensions"});
  REQUIRE(csv.code == cli::ok);
  CHECK(csv.out.rfind("degree,free_rank,torsion_exponents\n0,0,1\n", 0) == 0);
  CHECK(csv.err.empty());
  const auto logged = run_cli({"brun", "--n", "1", "--max-degree", "20", "--log-extensions"});
  REQUIRE(logged.code == cli::ok);
  CHECK(logged.err.find("extension deg 3") != std::string::npos);
  CHECK(run_cli({"brun", "--n", "2", "--max-degree", "3"}).code == cli::usage);
  CHECK(run_cli({"brun", "--n", "4"}).code == cli::usage);
}

TEST_CASE("series subcommand", "[cli]") {
  const auto r = run_cli({"series", "--name", "rational", "--n", "2", "--m", "1", "--max-degree", "7"});
  REQUIRE(r.code == cli::ok);
  CHECK(r.out == "degree,dim\n0,1\n1,0\n2,1\n3,1\n4,1\n5,1\n6,1\n7,2\n");
  CHECK(run_cli({"series", "--name", "rational", "--n", "1", "--m", "2"}).code == cli::usage);
}

TEST_CASE("verify subcommand", "[cli]") {
  const auto r = run_cli({"verify", "--suite", "ku"});
  REQUIRE(r.code == cli::ok);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j.at("ok") == true);
  CHECK(j.at("flag_count") == 0);
  CHECK(j.at("reports").size() == 1);
}

TEST_CASE("usage errors", "[cli]") {
  CHECK(run_cli({}).code == cli::usage);
  CHECK(run_cli({"compute"}).code == cli::usage);
  CHECK(run_cli({"compute", "--model", "nope"}).code == cli::usage);
  CHECK(run_cli({"compute", "--model", "thh-z", "--prime", "4"}).code == cli::usage);
  CHECK(run_cli({"compute", "--model", "thh-z", "--format", "xml"}).code == cli::usage);
  CHECK(run_cli({"verify", "--suite", "everything"}).code == cli::usage);
  CHECK(run_cli({"--help"}).code == cli::ok);
}

TEST_CASE("charts", "[cli]") {
  const Prime p(2);
  SECTION("zero module has axes and no dots") {
    const auto doc = build_chart(zero_module(p), 10);
    CHECK(doc.dots.empty());
    const auto svg = to_svg(doc);
    CHECK(svg.find("id=\"axes\"") != std::string::npos);
    CHECK(svg.find("<circle") == std::string::npos);
  }
  SECTION("THH(l) dots match the realized groups") {
    const auto ell = thh_ell(p);
    const auto doc = build_chart(ell, 40);
    const auto groups = realize_range(ell, 40);
    for (std::int64_t d = 0; d <= 40; ++d) {
      const auto& g = groups[std::size_t(d)];
      CHECK(doc.dots_in(d) == std::size_t(g.free_rank()) + g.torsion().size());
    }
    CHECK(doc.dots_in(0) == 1);
    CHECK(doc.dots_in(1) == 0);
    CHECK(doc.dots_in(2) == 1);
    CHECK(doc.dots_in(3) == 1);
    // the unit tower is strutted all the way up
    std::size_t unit_struts = 0;
    for (const auto& e : doc.struts) {
      CHECK(doc.dots[e.to].degree == doc.dots[e.from].degree + 2);
      if (doc.dots[e.from].label == "1") ++unit_struts;
    }
    CHECK(unit_struts == 20);
  }
  SECTION("the spectral sequence chart marks the first extension") {
    const auto run = cli::brun_for(2, p, 40);
    const auto doc = build_chart(run);
    REQUIRE_FALSE(doc.extensions.empty());
    CHECK(doc.dots[doc.extensions.front().from].degree == 10);
    for (std::int64_t d = 0; d <= 40; ++d) {
      const auto& g = run.at(d).abutment;
      CHECK(doc.dots_in(d) == std::size_t(g.free_rank()) + g.torsion().size());
    }
    const auto svg = run_cli({"chart", "--model", "thh-bp2-bp1", "--max-degree", "40"});
    REQUIRE(svg.code == cli::ok);
    CHECK(svg.out.find("stroke-dasharray") != std::string::npos);
    CHECK(svg.out == run_cli({"chart", "--model", "thh-bp2-bp1", "--max-degree", "40"}).out);
  }
  SECTION("unwritable output") {
    CHECK(run_cli({"chart", "--model", "thh-ell", "--output", "/nonexistent-dir/x.svg"}).code == cli::io);
  }
}

#ifdef THH_CLI_PATH
TEST_CASE("the installed binary reports exit codes", "[cli]") {
  auto status = [](const std::string& args) {
    const int s = std::system((std::string(THH_CLI_PATH) + " " + args + " > /dev/null 2>&1").c_str());
    return WIFEXITED(s) ? WEXITSTATUS(s) : -1;
  };
  CHECK(status("compute --model thh-z --max-degree 8") == 0);
  CHECK(status("compute --model nope") == 2);
  CHECK(status("chart --model thh-fp --output /nonexistent-dir/x.svg") == 3);
}
#endif

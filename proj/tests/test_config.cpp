#include <sstream>

#include "dfp/config.hpp"
#include "doctest.h"

using namespace dfp;

TEST_CASE("defaults survive an empty config") {
  std::istringstream in("");
  const RunConfig cfg = parse_run_config(in);
  CHECK(cfg.train_window == 52);
  CHECK(cfg.horizon == 10);
  CHECK(cfg.decomposition == AnovaMethod::FM);
  CHECK(!cfg.k_rule.is_fixed);
  CHECK(cfg.kernel == LagKernel::Bartlett);
  CHECK(!cfg.bandwidth.has_value());
  CHECK(cfg.clr_on);
  CHECK(cfg.methods == std::vector<std::string>{"fm"});
  CHECK(cfg.seed == 0);
}

TEST_CASE("full config with comments, blanks and spacing") {
  std::istringstream in(
      "# run settings\n"
      "train_window = 30   # short panel\n"
      "horizon=5\n"
      "\n"
      "decomposition = fmp\n"
      "k_rule = fixed:6\n"
      "kernel = flat_top\n"
      "bandwidth = fixed:3.5\n"
      "clr = off\n"
      "methods = fm, fmp ,gsy,naive\n"
      "seed = 42\n");
  const RunConfig cfg = parse_run_config(in);
  CHECK(cfg.train_window == 30);
  CHECK(cfg.horizon == 5);
  CHECK(cfg.decomposition == AnovaMethod::FMP);
  REQUIRE(cfg.k_rule.is_fixed);
  CHECK(cfg.k_rule.k == 6);
  CHECK(cfg.kernel == LagKernel::FlatTop);
  REQUIRE(cfg.bandwidth.has_value());
  CHECK(*cfg.bandwidth == doctest::Approx(3.5));
  CHECK(!cfg.clr_on);
  CHECK(cfg.methods == std::vector<std::string>{"fm", "fmp", "gsy", "naive"});
  CHECK(cfg.seed == 42);
}

TEST_CASE("later keys override earlier ones, bandwidth can return to plugin") {
  std::istringstream in(
      "bandwidth = fixed:2\n"
      "bandwidth = plugin\n"
      "train_window = 11\n"
      "train_window = 12\n");
  const RunConfig cfg = parse_run_config(in);
  CHECK(!cfg.bandwidth.has_value());
  CHECK(cfg.train_window == 12);
}

TEST_CASE("unknown keys and malformed lines are rejected with context") {
  {
    std::istringstream in("window = 30\n");
    CHECK_THROWS_WITH_AS(parse_run_config(in), doctest::Contains("unknown key 'window'"),
                         std::invalid_argument);
  }
  {
    std::istringstream in("train_window = 30\njust some text\n");
    CHECK_THROWS_WITH_AS(parse_run_config(in), doctest::Contains("line 2"),
                         std::invalid_argument);
  }
}

TEST_CASE("invalid values name the key and the value") {
  const char* bad[] = {
      "train_window = zero\n",  "train_window = -3\n", "horizon = 0\n",
      "decomposition = mean\n", "k_rule = fixed:0\n",  "k_rule = six\n",
      "kernel = tophat\n",      "bandwidth = -1\n",    "bandwidth = fixed:0\n",
      "bandwidth = fixed:x\n",  "clr = maybe\n",       "methods = \n",
      "seed = twelve\n",
  };
  for (const char* text : bad) {
    std::istringstream in(text);
    CHECK_THROWS_AS(parse_run_config(in), std::invalid_argument);
  }
  {
    std::istringstream in("kernel = tophat\n");
    CHECK_THROWS_WITH_AS(parse_run_config(in),
                         doctest::Contains("invalid value 'tophat' for key 'kernel'"),
                         std::invalid_argument);
  }
}

TEST_CASE("validate_config enforces the documented bounds") {
  RunConfig cfg;
  cfg.train_window = 9;
  CHECK_THROWS_WITH_AS(validate_config(cfg), doctest::Contains("train_window"),
                       std::invalid_argument);
  cfg.train_window = 10;
  CHECK_NOTHROW(validate_config(cfg));

  cfg.horizon = 0;
  CHECK_THROWS_AS(validate_config(cfg), std::invalid_argument);
  cfg.horizon = 1;

  cfg.methods = {};
  CHECK_THROWS_AS(validate_config(cfg), std::invalid_argument);
  cfg.methods = {"fm", "ets"};
  CHECK_THROWS_WITH_AS(validate_config(cfg), doctest::Contains("unknown method 'ets'"),
                       std::invalid_argument);
  cfg.methods = {"fm", "fm"};
  CHECK_THROWS_WITH_AS(validate_config(cfg), doctest::Contains("duplicate method"),
                       std::invalid_argument);
  cfg.methods = {"fm", "fmp", "gsy", "naive"};
  CHECK_NOTHROW(validate_config(cfg));
}

TEST_CASE("config parse errors surface through the stream reader") {
  // parse_run_config validates at the end, so a config that is well formed
  // line by line can still fail the bounds
  std::istringstream in("train_window = 9\n");
  CHECK_THROWS_WITH_AS(parse_run_config(in), doctest::Contains("at least 10"),
                       std::invalid_argument);
}

TEST_CASE("missing config file") {
  CHECK_THROWS_WITH_AS(parse_run_config_file("/nonexistent/path.cfg"),
                       doctest::Contains("cannot open"), std::invalid_argument);
}

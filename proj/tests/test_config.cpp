#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <functional>
#include <string>

#include "zobeam/config.hpp"

using namespace zobeam;

namespace {

ConfigFile parse(const std::string& text) {
  return ConfigFile::parse_text(text, "test.toml");
}

std::string message_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const std::exception& err) {
    return err.what();
  }
  return "";
}

std::string config_dir() { return ZOBEAM_CONFIG_DIR; }

}  // namespace

TEST_CASE("scalar values parse with their declared types") {
  const ConfigFile f = parse(
      "[alpha]\n"
      "count = 42\n"
      "rate = 1.5e-3\n"
      "negative = -7\n"
      "flag = true\n"
      "off = false\n"
      "name = \"hello world\"\n"
      "escaped = \"a\\\"b\\\\c\\nd\\te\"\n");
  CHECK(f.get_int("alpha.count") == 42);
  CHECK(f.get_real("alpha.rate") == doctest::Approx(1.5e-3));
  CHECK(f.get_int("alpha.negative") == -7);
  CHECK(f.get_bool("alpha.flag"));
  CHECK_FALSE(f.get_bool("alpha.off"));
  CHECK(f.get_text("alpha.name") == "hello world");
  CHECK(f.get_text("alpha.escaped") == "a\"b\\c\nd\te");
}

TEST_CASE("integers convert where reals are expected but not vice versa") {
  const ConfigFile f = parse("[a]\nn = 3\nx = 2.5\n");
  CHECK(f.get_real("a.n") == 3.0);
  const std::string msg =
      message_of([&] { (void)f.get_int("a.x"); });
  CHECK(msg.find("a.x") != std::string::npos);
  CHECK(msg.find("integer") != std::string::npos);
}

TEST_CASE("comments, blank lines, and inline comments are ignored") {
  const ConfigFile f = parse(
      "# leading comment\n"
      "\n"
      "[s]\n"
      "a = 1  # trailing comment\n"
      "b = \"with # inside\"  # real comment\n");
  CHECK(f.get_int("s.a") == 1);
  CHECK(f.get_text("s.b") == "with # inside");
}

TEST_CASE("arrays parse and reject mixed access") {
  const ConfigFile f = parse(
      "[s]\n"
      "ints = [1, 2, 3]\n"
      "reals = [1.0, 2, 3.5]\n"
      "trailing = [4, 5,]\n"
      "empty = []\n");
  CHECK(f.get_int_array("s.ints") == std::vector<long long>{1, 2, 3});
  CHECK(f.get_real_array("s.reals") == std::vector<double>{1.0, 2.0, 3.5});
  CHECK(f.get_int_array("s.trailing") == std::vector<long long>{4, 5});
  CHECK(f.get_int_array("s.empty").empty());
  CHECK(f.is_array("s.ints"));
  const std::string msg = message_of([&] { (void)f.get_int("s.ints"); });
  CHECK(msg.find("s.ints") != std::string::npos);
}

TEST_CASE("broadcast expands scalars and enforces array length") {
  const ConfigFile f = parse("[s]\none = 2.5\nfour = [1, 2, 3, 4]\n");
  const Eigen::VectorXd b = f.get_broadcast("s.one", 3);
  CHECK(b.size() == 3);
  CHECK(b.minCoeff() == 2.5);
  CHECK(b.maxCoeff() == 2.5);
  const Eigen::VectorXd v = f.get_broadcast("s.four", 4);
  CHECK(v(2) == 3.0);
  const std::string msg =
      message_of([&] { (void)f.get_broadcast("s.four", 3); });
  CHECK(msg.find("s.four") != std::string::npos);
  CHECK(msg.find("3") != std::string::npos);
}

TEST_CASE("duplicate keys are rejected with the first definition line") {
  const std::string msg = message_of(
      [] { parse("[s]\na = 1\nb = 2\na = 3\n"); });
  CHECK(msg.find("duplicate") != std::string::npos);
  CHECK(msg.find("s.a") != std::string::npos);
  CHECK(msg.find("line 2") != std::string::npos);
}

TEST_CASE("malformed lines report the origin and line number") {
  CHECK(message_of([] { parse("[s]\nkey with space = 1\n"); })
            .find("test.toml:2") != std::string::npos);
  CHECK(message_of([] { parse("[s]\nnovalue\n"); }).find("test.toml:2") !=
        std::string::npos);
  CHECK(message_of([] { parse("not a section]\n"); }).find("test.toml:1") !=
        std::string::npos);
  CHECK(message_of([] { parse("[s]\nx = [1, [2]]\n"); }).find("nested") !=
        std::string::npos);
  CHECK(message_of([] { parse("[s]\nx = 1e999\n"); }).find("test.toml:2") !=
        std::string::npos);
}

TEST_CASE("missing keys name the key and the fallbacks engage") {
  const ConfigFile f = parse("[s]\na = 1\n");
  const std::string msg = message_of([&] { (void)f.get_int("s.b"); });
  CHECK(msg.find("s.b") != std::string::npos);
  CHECK(f.get_int_or("s.b", 9) == 9);
  CHECK(f.get_real_or("s.b", 0.5) == 0.5);
  CHECK(f.get_bool_or("s.b", true));
  CHECK(f.get_text_or("s.b", "x") == "x");
  CHECK(f.has("s.a"));
  CHECK_FALSE(f.has("s.b"));
}

TEST_CASE("subsections come back in file order") {
  const ConfigFile f = parse(
      "[schedule.zeta]\nmarks = [0]\n"
      "[schedule.alpha]\nmarks = [0]\n"
      "[other.beta]\nx = 1\n");
  const std::vector<std::string> subs = f.subsections("schedule");
  REQUIRE(subs.size() == 2);
  CHECK(subs[0] == "zeta");
  CHECK(subs[1] == "alpha");
}

TEST_CASE("unused keys are tracked") {
  const ConfigFile f = parse("[s]\na = 1\nb = 2\n");
  (void)f.get_int("s.a");
  const std::vector<std::string> unused = f.unused_keys();
  REQUIRE(unused.size() == 1);
  CHECK(unused[0] == "s.b");
}

TEST_CASE("fingerprint is stable and content sensitive") {
  CHECK(fnv1a64("") == 14695981039346656037ull);
  CHECK(fnv1a64("a") != fnv1a64("b"));
  CHECK(fnv1a64("abc") == fnv1a64("abc"));
}

namespace {

std::string write_temp(const std::string& name, const std::string& text) {
  const std::string path = "zobeam_" + name;
  std::ofstream out(path);
  out << text;
  out.close();
  return path;
}

const char* kMinimal =
    "[scenario]\n"
    "tx_antennas = 2\n"
    "users = 2\n"
    "irs_elements = 4\n"
    "power_budget_watts = 1.0\n"
    "noise_var_watts = 1.0\n"
    "[optimizer]\n"
    "iterations = 10\n"
    "step_size = 0.1\n"
    "smoothing = 0.01\n";

}  // namespace

TEST_CASE("a minimal experiment file loads with defaults") {
  const std::string path = write_temp("minimal.toml", kMinimal);
  const ExperimentSpec spec = load_experiment(path);
  std::remove(path.c_str());
  CHECK(spec.scenario.tx_antennas == 2);
  CHECK(spec.scenario.users == 2);
  CHECK(spec.scenario.weights.size() == 2);
  CHECK(spec.scenario.weights(0) == 1.0);
  CHECK(spec.irs.kind == IrsKind::ideal);
  CHECK(spec.irs.elements == 4);
  CHECK(spec.optimizer.iterations == 10);
  CHECK(spec.optimizer.warm_start);
  CHECK(spec.optimizer.step_size == 0.1);
  CHECK(spec.seeds == std::vector<int>{0});
  CHECK(spec.spec_seed == 1);
  CHECK(spec.eval_realizations == 200);
  CHECK(spec.config_fingerprint != 0);
  CHECK(spec.config_path == path);
}

TEST_CASE("unknown keys are rejected by name") {
  const std::string path = write_temp(
      "unknown.toml", std::string(kMinimal) + "[experiment]\ntypo_field = 3\n");
  const std::string msg = message_of([&] { load_experiment(path); });
  std::remove(path.c_str());
  CHECK(msg.find("typo_field") != std::string::npos);
  CHECK(msg.find("unknown") != std::string::npos);
}

TEST_CASE("field violations name the offending field") {
  const std::string bad =
      "[scenario]\n"
      "tx_antennas = 0\n"
      "users = 2\n"
      "irs_elements = 4\n"
      "power_budget_watts = 1.0\n"
      "noise_var_watts = 1.0\n"
      "[optimizer]\n"
      "iterations = 10\n"
      "step_size = 0.1\n"
      "smoothing = 0.01\n";
  const std::string path = write_temp("bad.toml", bad);
  const std::string msg = message_of([&] { load_experiment(path); });
  std::remove(path.c_str());
  CHECK(msg.find("tx_antennas") != std::string::npos);
}

TEST_CASE("negative step sizes and bad rules are rejected") {
  {
    const std::string path = write_temp(
        "badstep.toml", std::string(
                            "[scenario]\n"
                            "tx_antennas = 2\n"
                            "users = 2\n"
                            "irs_elements = 4\n"
                            "power_budget_watts = 1.0\n"
                            "noise_var_watts = 1.0\n"
                            "[optimizer]\n"
                            "iterations = 10\n"
                            "step_size = -0.1\n"
                            "smoothing = 0.01\n"));
    const std::string msg = message_of([&] { load_experiment(path); });
    std::remove(path.c_str());
    CHECK(msg.find("step_size") != std::string::npos);
  }
  {
    const std::string path = write_temp(
        "badrule.toml", std::string(
                            "[scenario]\n"
                            "tx_antennas = 2\n"
                            "users = 2\n"
                            "irs_elements = 4\n"
                            "power_budget_watts = 1.0\n"
                            "noise_var_watts = 1.0\n"
                            "[optimizer]\n"
                            "iterations = 10\n"
                            "step_rule = \"bogus\"\n"
                            "smoothing = 0.01\n"));
    const std::string msg = message_of([&] { load_experiment(path); });
    std::remove(path.c_str());
    CHECK(msg.find("step_rule") != std::string::npos);
    CHECK(msg.find("bogus") != std::string::npos);
  }
}

TEST_CASE("rule-based step and smoothing fill the optimizer values") {
  const std::string text =
      "[scenario]\n"
      "tx_antennas = 2\n"
      "users = 2\n"
      "irs_elements = 4\n"
      "power_budget_watts = 1.0\n"
      "noise_var_watts = 1.0\n"
      "[optimizer]\n"
      "iterations = 3\n"
      "step_rule = \"analytic\"\n"
      "step_delta_f = 12.0\n"
      "step_c2 = 3.0\n"
      "step_rho = 1.0\n"
      "smoothing_rule = \"dimension\"\n"
      "smoothing_scale = 1.0\n";
  const std::string path = write_temp("rules.toml", text);
  const ExperimentSpec spec = load_experiment(path);
  std::remove(path.c_str());
  CHECK(spec.optimizer.step_size == doctest::Approx(1.0));
  // effective dimension 4, iterations 3 -> 1 / sqrt(4 * 4)
  CHECK(spec.optimizer.smoothing == doctest::Approx(0.25));
}

TEST_CASE("seed lists and seed counts both work") {
  const std::string base(kMinimal);
  {
    const std::string path =
        write_temp("seedcount.toml", base + "[experiment]\nseeds = 4\n");
    const ExperimentSpec spec = load_experiment(path);
    std::remove(path.c_str());
    CHECK(spec.seeds == std::vector<int>{0, 1, 2, 3});
  }
  {
    const std::string path =
        write_temp("seedlist.toml", base + "[experiment]\nseeds = [3, 1, 8]\n");
    const ExperimentSpec spec = load_experiment(path);
    std::remove(path.c_str());
    CHECK(spec.seeds == std::vector<int>{3, 1, 8});
  }
  {
    const std::string path =
        write_temp("seeddup.toml", base + "[experiment]\nseeds = [1, 1]\n");
    const std::string msg = message_of([&] { load_experiment(path); });
    std::remove(path.c_str());
    CHECK(msg.find("seeds") != std::string::npos);
  }
}

TEST_CASE("schedules load ordered stages and reject bad marks") {
  const std::string base(kMinimal);
  {
    const std::string path = write_temp(
        "sched.toml", base +
                          "[schedule.fast]\nmarks = [0, 5]\nbudgets = [9, "
                          "4]\n[schedule.slow]\nmarks = [0]\nbudgets = [2]\n");
    const ExperimentSpec spec = load_experiment(path);
    std::remove(path.c_str());
    REQUIRE(spec.schedules.size() == 2);
    CHECK(spec.schedules[0].name == "fast");
    CHECK(spec.schedules[0].stages.size() == 2);
    CHECK(spec.schedules[0].stages[1].start_iteration == 5);
    CHECK(spec.schedules[0].stages[1].budget.max_iterations == 4);
    CHECK(spec.schedules[1].name == "slow");
  }
  {
    const std::string path = write_temp(
        "sched_bad.toml",
        base + "[schedule.bad]\nmarks = [5, 0]\nbudgets = [9, 4]\n");
    const std::string msg = message_of([&] { load_experiment(path); });
    std::remove(path.c_str());
    CHECK(msg.find("bad") != std::string::npos);
  }
  {
    const std::string path = write_temp(
        "sched_len.toml", base + "[schedule.x]\nmarks = [0]\nbudgets = [9, 4]\n");
    const std::string msg = message_of([&] { load_experiment(path); });
    std::remove(path.c_str());
    CHECK(msg.find("marks") != std::string::npos);
  }
}

TEST_CASE("varactor surfaces validate their circuit") {
  const std::string text =
      "[scenario]\n"
      "tx_antennas = 2\n"
      "users = 2\n"
      "irs_elements = 4\n"
      "power_budget_watts = 1.0\n"
      "noise_var_watts = 1.0\n"
      "[irs]\n"
      "kind = \"varactor\"\n"
      "capacitance_min_picofarads = 2.0\n"
      "capacitance_max_picofarads = 0.2\n"
      "[optimizer]\n"
      "iterations = 10\n"
      "step_size = 0.1\n"
      "smoothing = 0.01\n";
  const std::string path = write_temp("varbad.toml", text);
  const std::string msg = message_of([&] { load_experiment(path); });
  std::remove(path.c_str());
  CHECK(msg.find("capacitance") != std::string::npos);
}

TEST_CASE("the shipped desk-scale configuration loads with pinned shape") {
  const ExperimentSpec spec =
      load_experiment(config_dir() + "/desk_scale.toml");
  CHECK(spec.scenario.tx_antennas == 4);
  CHECK(spec.scenario.users == 8);
  CHECK(spec.scenario.irs_elements == 64);
  CHECK(spec.optimizer.iterations == 10000);
  CHECK_FALSE(spec.optimizer.warm_start);
  CHECK(spec.seeds.size() == 10);
  CHECK(spec.sweep_budgets == std::vector<int>{1, 2, 3, 5, 10, 20, 50});
  CHECK(spec.train_budget == 20);
  CHECK(spec.deploy_budgets == std::vector<int>{1, 2, 3, 4, 5});
  REQUIRE(spec.schedules.size() == 3);
  CHECK(spec.schedules[0].name == "constant_20");
  CHECK(spec.schedules[1].name == "decaying");
  CHECK(spec.schedules[2].name == "aggressive");
  CHECK(spec.schedules[2].stages.back().budget.max_iterations == 2);
  CHECK(spec.irs.kind == IrsKind::ideal);
}

TEST_CASE("the shipped full-size configuration loads with pinned shape") {
  const ExperimentSpec spec =
      load_experiment(config_dir() + "/paper_scale.toml");
  CHECK(spec.scenario.tx_antennas == 6);
  CHECK(spec.scenario.users == 32);
  CHECK(spec.scenario.irs_elements == 1000);
  CHECK(spec.optimizer.iterations == 40000);
  CHECK(spec.seeds.size() == 60);
  CHECK(spec.schedules.size() == 3);
  CHECK(spec.schedules[1].stages.size() == 5);
  CHECK(spec.schedules[1].stages[4].start_iteration == 32000);
}

TEST_CASE("the shipped varactor configuration loads") {
  const ExperimentSpec spec =
      load_experiment(config_dir() + "/desk_scale_varactor.toml");
  CHECK(spec.irs.kind == IrsKind::varactor);
  CHECK(spec.irs.elements == 64);
  CHECK(spec.irs.theta_dim() == 64);
  CHECK(spec.physical_budget == 10);
}

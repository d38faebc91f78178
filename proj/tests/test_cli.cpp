#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <sys/wait.h>
#include <unistd.h>

#include <doctest.h>
#include <json.hpp>

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

struct CliFixture {
  fs::path dir;
  CliFixture() {
    dir = fs::temp_directory_path() /
          ("tensorgen_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter()++));
    fs::create_directories(dir);
  }
  ~CliFixture() { fs::remove_all(dir); }

  std::string file(const std::string& name) const { return (dir / name).string(); }

  std::string write_config(const std::string& name, const json& j) const {
    const std::string path = file(name);
    std::ofstream(path) << j.dump(2);
    return path;
  }

  /// Run the installed binary with the given argument string.
  RunResult run(const std::string& args) const {
    const std::string out_path = file("stdout.txt");
    const std::string err_path = file("stderr.txt");
    const std::string command = std::string(TENSORGEN_CLI_PATH) + " " + args + " >" + out_path +
                                " 2>" + err_path;
    const int status = std::system(command.c_str());
    RunResult result;
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    result.out = slurp(out_path);
    result.err = slurp(err_path);
    return result;
  }

  static int& counter() {
    static int n = 0;
    return n;
  }
};

json demo_config() {
  return json{{"seed", 5},
              {"shape", {5, 4, 3}},
              {"model", {{"type", "cp"}, {"rank", 2}}},
              {"factors", json::object({{"method", "multi_normal"}})},
              {"effects", {{{"kind", "awgn"}, {"snr_db", 20.0}}}}};
}

}  // namespace

TEST_CASE("generate writes files and inspect reads them back") {
  CliFixture fx;
  const std::string config = fx.write_config("cfg.json", demo_config());
  const std::string out = fx.file("data.csv");

  const RunResult gen = fx.run("generate -c " + config + " -o " + out);
  CHECK(gen.exit_code == 0);
  CHECK(gen.out.find("wrote:") != std::string::npos);
  CHECK(fs::exists(out));
  CHECK(fs::exists(fx.file("data.manifest.json")));

  const RunResult ins = fx.run("inspect " + out);
  CHECK(ins.exit_code == 0);
  CHECK(ins.out.find("5x4x3") != std::string::npos);
  CHECK(ins.out.find("cp rank 2") != std::string::npos);
  CHECK(ins.err.empty());
}

TEST_CASE("json summaries are valid json") {
  CliFixture fx;
  const std::string config = fx.write_config("cfg.json", demo_config());
  const RunResult gen =
      fx.run("generate -c " + config + " -o " + fx.file("d.h5") + " --format hdf5 --json");
  REQUIRE(gen.exit_code == 0);
  const json summary = json::parse(gen.out);
  CHECK(summary.at("seed") == 5);
  CHECK(summary.at("representation") == "dense");
  CHECK(summary.at("files").size() == 1);

  const RunResult ins = fx.run("inspect " + fx.file("d.h5") + " --json");
  REQUIRE(ins.exit_code == 0);
  const json report = json::parse(ins.out);
  CHECK(report.at("has_manifest") == true);
  CHECK(report.at("manifest").at("seed") == 5);
}

TEST_CASE("the seed flag overrides the config and is recorded") {
  CliFixture fx;
  const std::string config = fx.write_config("cfg.json", demo_config());
  const RunResult gen =
      fx.run("generate -c " + config + " -o " + fx.file("d.csv") + " --seed 99");
  REQUIRE(gen.exit_code == 0);
  const json manifest = json::parse(slurp(fx.file("d.manifest.json")));
  CHECK(manifest.at("seed") == 99);
  CHECK(manifest.at("overrides").at("seed") == 99);
}

TEST_CASE("identical invocations write identical bytes") {
  CliFixture fx;
  const std::string config = fx.write_config("cfg.json", demo_config());
  const std::string out = fx.file("d.csv");
  REQUIRE(fx.run("generate -c " + config + " -o " + out).exit_code == 0);
  const std::string first = slurp(out);
  REQUIRE(fx.run("generate -c " + config + " -o " + out + " --overwrite").exit_code == 0);
  CHECK(slurp(out) == first);
}

TEST_CASE("validate accepts a good config and reports bad fields") {
  CliFixture fx;
  const std::string good = fx.write_config("good.json", demo_config());
  const RunResult ok = fx.run("validate -c " + good);
  CHECK(ok.exit_code == 0);
  CHECK(ok.out == "OK\n");

  json bad = demo_config();
  bad["factors"] = {{{"method", "streaming"}, {"epsilon", 1.5}},
                    {{"method", "uniform"}},
                    {{"method", "uniform"}}};
  bad["temporal_mode"] = 0;
  const std::string bad_path = fx.write_config("bad.json", bad);
  const RunResult fail = fx.run("validate -c " + bad_path);
  CHECK(fail.exit_code == 1);
  CHECK(fail.err.find("epsilon") != std::string::npos);
}

TEST_CASE("congruence outside the pd range exits with a config error") {
  CliFixture fx;
  json bad = demo_config();
  bad["model"]["rank"] = 3;
  bad["effects"] = {{{"kind", "column_congruence"}, {"mode", 0}, {"c", -0.6}}};
  const std::string path = fx.write_config("bad.json", bad);
  const RunResult result = fx.run("validate -c " + path);
  CHECK(result.exit_code == 1);
  CHECK(result.err.find("positive definite") != std::string::npos);
}

TEST_CASE("io failures exit with code 2") {
  CliFixture fx;
  const RunResult missing = fx.run("inspect " + fx.file("absent.csv"));
  CHECK(missing.exit_code == 2);

  const std::string config = fx.write_config("cfg.json", demo_config());
  const std::string out = fx.file("d.csv");
  REQUIRE(fx.run("generate -c " + config + " -o " + out).exit_code == 0);
  const RunResult clobber = fx.run("generate -c " + config + " -o " + out);
  CHECK(clobber.exit_code == 2);
  CHECK(clobber.err.find("overwrite") != std::string::npos);
}

TEST_CASE("inspect warns but succeeds on a bare csv") {
  CliFixture fx;
  const std::string path = fx.file("bare.csv");
  std::ofstream(path) << "i1,i2,value\n1,1,2.0\n3,2,1.5\n";
  const RunResult result = fx.run("inspect " + path);
  CHECK(result.exit_code == 0);
  CHECK(result.err.find("no manifest") != std::string::npos);
  CHECK(result.out.find("3x2") != std::string::npos);
}

TEST_CASE("a config parse error names the file") {
  CliFixture fx;
  const std::string path = fx.file("broken.json");
  std::ofstream(path) << "{ not json";
  const RunResult result = fx.run("validate -c " + path);
  CHECK(result.exit_code == 1);
  CHECK(result.err.find("JSON") != std::string::npos);
}

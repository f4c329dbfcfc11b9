// End-to-end exercises of the quditml binary. The binary path comes from the
// QUDITML_CLI environment variable (set by ctest).

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

std::string cli_path() {
    const char* path = std::getenv("QUDITML_CLI");
    REQUIRE_MESSAGE(path != nullptr, "QUDITML_CLI must point at the binary");
    return path;
}

int run(const std::string& args) {
    const std::string command = cli_path() + " " + args + " >/dev/null 2>&1";
    const int status = std::system(command.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name)
        : path(fs::temp_directory_path() / ("quditml_cli_" + name)) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string str(const std::string& sub = "") const {
        return (sub.empty() ? path : path / sub).string();
    }
};

} // namespace

TEST_CASE("prepare writes split CSVs and a manifest") {
    TempDir dir("prepare");
    CHECK(run("prepare --data synthetic:20 --seed 42 --out " + dir.str("prep")) == 0);
    CHECK(fs::exists(dir.path / "prep" / "train.csv"));
    CHECK(fs::exists(dir.path / "prep" / "test.csv"));
    const std::string manifest = slurp(dir.path / "prep" / "manifest.json");
    CHECK(manifest.find("\"train_rows\": 144") != std::string::npos);
    CHECK(manifest.find("\"test_rows\": 36") != std::string::npos);
    CHECK(manifest.find("\"warnings\": 0") != std::string::npos);
}

TEST_CASE("prepare on a too-short raw series emits empty splits plus a warning") {
    TempDir dir("series");
    {
        std::ofstream out(dir.path / "series.csv");
        out << "step,qber,skr,label\n";
        for (int i = 0; i < 5; ++i) {
            out << i << ",0.05,1000,0\n";
        }
    }
    CHECK(run("prepare --data series:" + dir.str("series.csv") + " --out " +
              dir.str("prep")) == 0);
    const std::string manifest = slurp(dir.path / "prep" / "manifest.json");
    CHECK(manifest.find("\"warnings\": 1") != std::string::npos);
    CHECK(manifest.find("\"train_rows\": 0") != std::string::npos);
}

TEST_CASE("train/evaluate/compare round trip on a small run") {
    TempDir dir("roundtrip");
    REQUIRE(run("prepare --data synthetic:20 --seed 7 --out " + dir.str("prep")) == 0);

    CHECK(run("train --model dense-nn --data " + dir.str("prep") + " --out " +
              dir.str("nn") + " --seed 1 --epochs 3") == 0);
    CHECK(fs::exists(dir.path / "nn" / "model.ckpt"));
    CHECK(fs::exists(dir.path / "nn" / "scaler.ckpt"));
    CHECK(fs::exists(dir.path / "nn" / "run.json"));
    CHECK(fs::exists(dir.path / "nn" / "train_report.txt"));
    CHECK(slurp(dir.path / "nn" / "run.json").find("\"weights\": 67328") !=
          std::string::npos);

    CHECK(run("evaluate --data " + dir.str("prep") + " --out " + dir.str("nn")) == 0);
    CHECK(fs::exists(dir.path / "nn" / "metrics.txt"));
    CHECK(fs::exists(dir.path / "nn" / "metrics.kv"));

    REQUIRE(run("train --model qudit-raw --data " + dir.str("prep") + " --out " +
                dir.str("raw") + " --seed 1 --epochs 2 --layers 2 --perm-seed 5") == 0);
    CHECK(slurp(dir.path / "raw" / "run.json").find("\"perm_seed\": 5") !=
          std::string::npos);
    REQUIRE(run("evaluate --data " + dir.str("prep") + " --out " + dir.str("raw")) == 0);

    CHECK(run("compare " + dir.str("nn") + " " + dir.str("raw") + " --out " +
              dir.str("table.txt")) == 0);
    const std::string table = slurp(dir.path / "table.txt");
    CHECK(table.find("dense-nn") != std::string::npos);
    CHECK(table.find("qudit-raw") != std::string::npos);
    // Declared model order puts dense-nn before qudit-raw.
    CHECK(table.find("dense-nn") < table.find("qudit-raw"));
}

TEST_CASE("qae-qudit training writes both checkpoints totaling 1130 weights") {
    TempDir dir("qq");
    REQUIRE(run("prepare --data synthetic:10 --seed 3 --out " + dir.str("prep")) == 0);
    CHECK(run("train --model qae-qudit --data " + dir.str("prep") + " --out " +
              dir.str("run") + " --seed 2 --epochs 2") == 0);
    CHECK(fs::exists(dir.path / "run" / "qae.ckpt"));
    CHECK(fs::exists(dir.path / "run" / "vqc.ckpt"));
    CHECK(slurp(dir.path / "run" / "run.json").find("\"weights\": 1130") !=
          std::string::npos);
}

TEST_CASE("qae-qubits training goes through the batched front end") {
    TempDir dir("qb");
    REQUIRE(run("prepare --data synthetic:10 --seed 3 --out " + dir.str("prep")) == 0);
    CHECK(run("train --model qae-qubits --data " + dir.str("prep") + " --out " +
              dir.str("run") + " --seed 2 --epochs 2 --layers 2") == 0);
    CHECK(fs::exists(dir.path / "run" / "qae.ckpt"));
    CHECK(fs::exists(dir.path / "run" / "model.ckpt"));
    CHECK(run("evaluate --data " + dir.str("prep") + " --out " + dir.str("run")) == 0);
}

TEST_CASE("exit codes") {
    TempDir dir("exits");
    SUBCASE("usage errors exit 1") {
        CHECK(run("train --data /nonexistent --out " + dir.str("x")) == 1);   // no model
        CHECK(run("nonsense-subcommand") == 1);
        CHECK(run("train --model bogus --data " + dir.str() + " --out " + dir.str("x")) ==
              1);
    }
    SUBCASE("missing input exits 2") {
        CHECK(run("train --model dense-nn --data " + dir.str("missing") + " --out " +
                  dir.str("x")) == 2);
        CHECK(run("evaluate --data " + dir.str("missing") + " --out " + dir.str("x")) ==
              2);
        CHECK(run("compare " + dir.str("a") + " " + dir.str("b")) == 2);
    }
    SUBCASE("compare with a single run exits 2") {
        CHECK(run("compare " + dir.str("only")) == 2);
    }
}

TEST_CASE("epochs=0 stores the seeded initial weights") {
    TempDir dir("init");
    REQUIRE(run("prepare --data synthetic:10 --seed 3 --out " + dir.str("prep")) == 0);
    REQUIRE(run("train --model dense-nn --data " + dir.str("prep") + " --out " +
                dir.str("a") + " --seed 9 --epochs 0") == 0);
    REQUIRE(run("train --model dense-nn --data " + dir.str("prep") + " --out " +
                dir.str("b") + " --seed 9 --epochs 0 --lr 0.5") == 0);
    // Same seed, no updates: the learning rate cannot matter.
    CHECK(slurp(dir.path / "a" / "model.ckpt") == slurp(dir.path / "b" / "model.ckpt"));
}

TEST_CASE("identical seeds give byte-identical artifacts") {
    TempDir dir("determinism");
    for (const std::string tag : {"one", "two"}) {
        REQUIRE(run("prepare --data synthetic:10 --seed 11 --out " + dir.str(tag)) == 0);
        REQUIRE(run("train --model qae-qudit --data " + dir.str(tag) + " --out " +
                    dir.str(tag + "_run") + " --seed 4 --epochs 2") == 0);
        REQUIRE(run("evaluate --data " + dir.str(tag) + " --out " + dir.str(tag + "_run")) ==
                0);
    }
    for (const std::string file : {"train.csv", "test.csv", "manifest.json"}) {
        CHECK(slurp(dir.path / "one" / file) == slurp(dir.path / "two" / file));
    }
    for (const std::string file :
         {"qae.ckpt", "vqc.ckpt", "scaler.ckpt", "train_report.txt", "metrics.txt",
          "metrics.kv", "run.json"}) {
        CHECK(slurp(dir.path / "one_run" / file) == slurp(dir.path / "two_run" / file));
    }
}

TEST_CASE("finite-difference mode trains through the CLI") {
    TempDir dir("fd");
    REQUIRE(run("prepare --data synthetic:5 --seed 3 --out " + dir.str("prep")) == 0);
    CHECK(run("train --model qudit-raw --data " + dir.str("prep") + " --out " +
              dir.str("run") + " --seed 1 --epochs 1 --layers 1 "
              "--grad-mode finite-difference") == 0);
    CHECK(slurp(dir.path / "run" / "train_report.txt")
              .find("grad-mode finite-difference") != std::string::npos);
}

TEST_CASE("a diverging run exits 3 and names the epoch") {
    TempDir dir("nan");
    REQUIRE(run("prepare --data synthetic:10 --seed 3 --out " + dir.str("prep")) == 0);
    CHECK(run("train --model dense-nn --data " + dir.str("prep") + " --out " +
              dir.str("run") + " --seed 1 --epochs 3 --lr 1e200") == 3);
}

TEST_CASE("config file values apply and flags win") {
    TempDir dir("config");
    REQUIRE(run("prepare --data synthetic:10 --seed 3 --out " + dir.str("prep")) == 0);
    {
        std::ofstream out(dir.path / "cfg.json");
        out << "{\"model\": \"dense-nn\", \"epochs\": 1, \"seed\": 5}\n";
    }
    CHECK(run("train --config " + dir.str("cfg.json") + " --data " + dir.str("prep") +
              " --out " + dir.str("a")) == 0);
    CHECK(slurp(dir.path / "a" / "run.json").find("\"epochs\": 1") != std::string::npos);
    // The flag overrides the config's epoch count.
    CHECK(run("train --config " + dir.str("cfg.json") + " --data " + dir.str("prep") +
              " --out " + dir.str("b") + " --epochs 2") == 0);
    CHECK(slurp(dir.path / "b" / "run.json").find("\"epochs\": 2") != std::string::npos);
}

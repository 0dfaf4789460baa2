#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

struct Sandbox {
    fs::path dir;
    explicit Sandbox(const std::string& name) : dir(fs::temp_directory_path() / ("polywave-cli-" + name)) {
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    ~Sandbox() { fs::remove_all(dir); }

    int run(const std::string& args) const {
        const std::string cmd = "cd " + dir.string() + " && POLYWAVE_CACHE=" + (dir / "cache").string() + " " +
                                POLYWAVE_CLI + " " + args + " > log.txt 2>&1";
        const int status = std::system(cmd.c_str());
        return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    }
    std::string read(const std::string& rel) const {
        std::ifstream in(dir / rel);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }
    nlohmann::json manifest(const std::string& out = "polywave-out") const {
        return nlohmann::json::parse(read(out + "/manifest.json"));
    }
};

const std::string kSquare = std::string(POLYWAVE_DATA) + "/square.poly";

} // namespace

TEST(Cli, EigsWritesTableAndManifest) {
    Sandbox s("eigs");
    ASSERT_EQ(s.run("eigs --surface " + kSquare + " --h 0.08 --modes 12"), 0) << s.read("log.txt");
    const std::string csv = s.read("polywave-out/eigenvalues.csv");
    EXPECT_EQ(csv.rfind("# schema=eigenvalues version=1\n", 0), 0u);
    const auto m = s.manifest();
    EXPECT_EQ(m["command"], "eigs");
    EXPECT_FALSE(m["partial"].get<bool>());
    ASSERT_EQ(m["files"].size(), 1u);
    EXPECT_EQ(m["files"][0]["rows"], 12);
    EXPECT_DOUBLE_EQ(m["config"]["h"].get<double>(), 0.08);
}

TEST(Cli, RerunIsByteIdentical) {
    Sandbox s("rerun");
    const std::string args = "eigs --surface " + kSquare + " --h 0.08 --modes 12 --output ";
    ASSERT_EQ(s.run(args + "a"), 0);
    fs::remove_all(s.dir / "cache");
    ASSERT_EQ(s.run(args + "b"), 0);
    EXPECT_EQ(s.read("a/eigenvalues.csv"), s.read("b/eigenvalues.csv"));
    ASSERT_EQ(s.run(args + "c"), 0); // served from the cache
    EXPECT_EQ(s.read("a/eigenvalues.csv"), s.read("c/eigenvalues.csv"));
}

TEST(Cli, BadInputExitsTwoWithPartialManifest) {
    Sandbox s("bad");
    EXPECT_EQ(s.run("eigs --surface missing.poly"), 2);
    const auto m = s.manifest();
    EXPECT_TRUE(m["partial"].get<bool>());
    EXPECT_NE(m["error"].get<std::string>().find("missing.poly"), std::string::npos);
    EXPECT_EQ(s.run("eigs --surface " + kSquare + " --h -1"), 2);
    EXPECT_EQ(s.run("eigs --no-such-flag"), 2);
}

TEST(Cli, ConfigFileWithFlagOverride) {
    Sandbox s("config");
    std::ofstream(s.dir / "run.ini") << "surface = \"" << kSquare << "\"\nh = 0.08\nmodes = 20\n";
    ASSERT_EQ(s.run("eigs --config run.ini --modes 10"), 0) << s.read("log.txt");
    const auto m = s.manifest();
    EXPECT_EQ(m["config"]["modes"], 10);
    EXPECT_DOUBLE_EQ(m["config"]["h"].get<double>(), 0.08);
    EXPECT_EQ(m["files"][0]["rows"], 10);
}

TEST(Cli, ConePointsAndReport) {
    Sandbox s("report");
    ASSERT_EQ(s.run("double --surface " + std::string(POLYWAVE_DATA) + "/lshape.poly"), 0);
    const std::string csv = s.read("polywave-out/cone_points.csv");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 2 + 6);
    ASSERT_EQ(s.run("report"), 0);
    EXPECT_NE(s.read("log.txt").find("cone_points.csv"), std::string::npos);
}

#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "jigsaw/cipher.hpp"
#include "jigsaw/image_io.hpp"
#include "jigsaw/metrics.hpp"
#include "support.hpp"

namespace jigsaw {
namespace {

namespace fs = std::filesystem;

int run(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string(JIGSAW_CLI) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = testing::scratch_dir("cli");
    write_image(dir_ / "plain.png", testing::natural_image(0));
    ASSERT_EQ(run("keygen --out " + p("key.txt") + " --seed 5", p("log")), 0) << slurp(dir_ / "log");
  }
  std::string p(const std::string& name) const { return (dir_ / name).string(); }
  fs::path dir_;
};

TEST_F(Cli, EncryptDecryptRoundTrip) {
  ASSERT_EQ(run("encrypt --in " + p("plain.png") + " --out " + p("enc.png") + " --key-file " + p("key.txt") +
                    " --truth " + p("truth.csv"),
                p("log")),
            0)
      << slurp(dir_ / "log");
  ASSERT_EQ(run("decrypt --in " + p("enc.png") + " --out " + p("dec.png") + " --key-file " + p("key.txt"), p("log")),
            0);
  EXPECT_EQ(read_image(dir_ / "dec.png"), read_image(dir_ / "plain.png"));
  EXPECT_NE(read_image(dir_ / "enc.png"), read_image(dir_ / "plain.png"));
  EXPECT_TRUE(fs::exists(dir_ / "truth.csv"));
}

TEST_F(Cli, JpegWritesStreamOrPixels) {
  ASSERT_EQ(run("jpeg --in " + p("plain.png") + " --out " + p("c.jpg") + " --quality 80 --subsampling 444", p("log")),
            0);
  const auto jpg = read_file(dir_ / "c.jpg");
  ASSERT_GE(jpg.size(), 2u);
  EXPECT_EQ(jpg[0], 0xFF);
  EXPECT_EQ(jpg[1], 0xD8);
  ASSERT_EQ(run("jpeg --in " + p("plain.png") + " --out " + p("c.png") + " --quality 80 --subsampling 444", p("log")),
            0);
  EXPECT_EQ(read_image(dir_ / "c.png").width(), 224);
}

TEST_F(Cli, AttackAndMetrics) {
  ASSERT_EQ(run("encrypt --in " + p("plain.png") + " --out " + p("enc.png") + " --key-file " + p("key.txt"), p("log")),
            0);
  ASSERT_EQ(run("attack --in " + p("enc.png") + " --out " + p("asm.png") + " --assembly " + p("asm.csv") + " --key-file " + p("key.txt") +
                    " --truth " + p("aligned.csv") + " --report " + p("report.csv") + " --restored " +
                    p("restored.png") + " --population 60 --generations 10",
                p("log")),
            0)
      << slurp(dir_ / "log");
  const std::string report = slurp(dir_ / "report.csv");
  EXPECT_EQ(report.substr(0, report.find('\n')), "restoration_score,tied_arrangements,solver_fitness,timed_out,dc,nc,lc");
  EXPECT_TRUE(fs::exists(dir_ / "restored.png"));
  EXPECT_TRUE(fs::exists(dir_ / "asm.png"));
  EXPECT_TRUE(fs::exists(dir_ / "asm.csv"));

  ASSERT_EQ(run("metrics --assembly " + p("aligned.csv") + " --truth " + p("aligned.csv"), p("out")), 0);
  EXPECT_EQ(slurp(dir_ / "out"), "dc,nc,lc\n1.000000,1.000000,1.000000\n");
}

TEST_F(Cli, ErrorsExitNonZero) {
  EXPECT_NE(run("decrypt --in " + p("missing.png") + " --out " + p("x.png") + " --key-file " + p("key.txt"), p("log")),
            0);
  EXPECT_NE(slurp(dir_ / "log").find("missing.png"), std::string::npos);
  EXPECT_NE(run("attack --in " + p("plain.png") + " --out " + p("x.bmp"), p("log")), 0);
  EXPECT_NE(slurp(dir_ / "log").find("unsupported image extension"), std::string::npos);
  EXPECT_NE(run("metrics --assembly " + p("key.txt") + " --truth " + p("key.txt"), p("log")), 0);
  EXPECT_NE(slurp(dir_ / "log").find("error:"), std::string::npos);
  EXPECT_NE(run("jpeg --in " + p("plain.png") + " --out " + p("x.jpg") + " --quality 0", p("log")), 0);
  EXPECT_NE(run("frobnicate", p("log")), 0);
}

}  // namespace
}  // namespace jigsaw

#include <doctest.h>

#include <sstream>

#include "cli.hpp"
#include "intent/audio.hpp"
#include "intent/text_io.hpp"
#include "support.hpp"

using intent::cli::run;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string value_of(const std::string& text, const std::string& key) {
  const auto pos = text.find(key + "=");
  if (pos == std::string::npos) return {};
  const auto end = text.find('\n', pos);
  return text.substr(pos + key.size() + 1, end - pos - key.size() - 1);
}

std::filesystem::path small_scenario() {
  static const auto dir = [] {
    const auto d = testing::scratch_dir("cli_data");
    const auto r = invoke({"synth", "--out", d.string(), "--participants", "2", "--duration", "600",
                           "--annotated-start", "400", "--annotated-end", "600", "--unsuccessful-rate", "2"});
    REQUIRE(r.code == 0);
    return d;
  }();
  return dir;
}

}  // namespace

TEST_CASE("config files expand before explicit flags") {
  const auto dir = testing::scratch_dir("cli_cfg");
  intent::text::write_file(dir / "run.conf", "# comment\nreps = 7\nwindows = 1,2\n\nseed=3\n");
  const auto args = intent::cli::expand_config({"run", "--reps", "9", "--config", (dir / "run.conf").string()});
  const std::vector<std::string> expected{"run", "--reps=7", "--windows=1,2", "--seed=3", "--reps", "9"};
  CHECK(args == expected);
  intent::text::write_file(dir / "bad.conf", "reps 7\n");
  CHECK(invoke({"run", "--config", (dir / "bad.conf").string()}).code == 2);
  CHECK(invoke({"run", "--config", (dir / "missing.conf").string()}).code == 2);
  intent::text::write_file(dir / "unknown.conf", "no-such-key = 1\n");
  CHECK(invoke({"stats-from-table", testing::fixture("table1.txt").string(), "--config",
                (dir / "unknown.conf").string()})
            .code == 2);
}

TEST_CASE("usage errors exit with 2") {
  CHECK(invoke({}).code == 2);
  CHECK(invoke({"frobnicate"}).code == 2);
  CHECK(invoke({"run", "--reps", "many"}).code == 2);
  CHECK(invoke({"run"}).code == 2);  // --data missing
  CHECK(invoke({"run", "--data", "x", "--windows", "1,abc"}).code == 2);
  CHECK(invoke({"run", "--data", "x", "--experiments", "everything"}).code == 2);
  CHECK(invoke({"run", "--data", "x", "--folds", "1"}).code == 2);
  CHECK(invoke({"--help"}).code == 0);
}

TEST_CASE("stats-from-table") {
  const auto r = invoke({"stats-from-table", testing::fixture("table1.txt").string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("6.545e-185 (sig)") != std::string::npos);
  CHECK(r.out.find("-0.0473") != std::string::npos);
  const auto dir = testing::scratch_dir("cli_stats");
  intent::text::write_file(dir / "bad.txt", "AUC scores | 1 second\nSuccessful | nope\n");
  CHECK(invoke({"stats-from-table", (dir / "bad.txt").string()}).code == 3);
  CHECK(invoke({"stats-from-table", (dir / "missing.txt").string()}).code == 3);
  CHECK(invoke({"stats-from-table", testing::fixture("table1.txt").string(), "--out", (dir / "o").string()}).code == 0);
  CHECK(std::filesystem::exists(dir / "o" / "welch.txt"));
}

TEST_CASE("synth output feeds run") {
  const auto data = small_scenario();
  const auto out = testing::scratch_dir("cli_run");
  const auto r = invoke({"run", "--data", data.string(), "--out", out.string(), "--windows", "1", "--experiments",
                         "successful,unsuccessful", "--reps", "3", "--epochs", "1", "--test-interval", "400,600"});
  CHECK(r.err.empty());
  REQUIRE(r.code == 0);
  CHECK(std::filesystem::exists(out / "auc_table.txt"));
  CHECK(r.out.find("Successful") != std::string::npos);
}

TEST_CASE("exit codes follow the failure kind") {
  const auto data = small_scenario();
  const auto out = testing::scratch_dir("cli_codes");
  const auto base = std::vector<std::string>{"run", "--data", data.string(), "--out", out.string(), "--windows", "1",
                                             "--experiments", "successful", "--reps", "2", "--epochs", "1",
                                             "--test-interval", "400,600"};
  CHECK(invoke({"run", "--data", (out / "nowhere").string()}).code == 3);
  auto infeasible = base;
  infeasible[6] = "150";
  CHECK(invoke(infeasible).code == 4);
  auto blowup = base;
  blowup.insert(blowup.end(), {"--learning-rate", "1e300", "--epochs", "3"});
  CHECK(invoke(blowup).code == 5);
}

TEST_CASE("filter-audio reports band power") {
  const auto dir = testing::scratch_dir("cli_audio");
  intent::audio::AudioClip c;
  c.sample_rate_hz = 44100;
  for (int i = 0; i < 44100; ++i) {
    const double t = i / 44100.0;
    double v = 0.5 * std::sin(2 * M_PI * 200 * t);
    if (i >= 22050 && i < 22491) v += 0.05 * std::sin(M_PI * (i - 22050) / 441.0) * std::sin(2 * M_PI * 16000 * t);
    c.samples.push_back(v);
  }
  intent::audio::write_wav(c, dir / "in.wav");
  const auto r = invoke({"filter-audio", (dir / "in.wav").string(), (dir / "out.wav").string(), "--cutoff", "15000",
                         "--gain", "20", "--probe", "200,16000"});
  REQUIRE(r.code == 0);
  const double voice = std::stod(value_of(r.out, "band_200hz_change_db"));
  const double click = std::stod(value_of(r.out, "band_16000hz_change_db"));
  CHECK(click - voice >= 30.0);
  CHECK(value_of(r.out, "clipped") == "0");
  CHECK(invoke({"filter-audio", (dir / "in.wav").string(), (dir / "o2.wav").string(), "--cutoff", "0"}).code == 2);
}

TEST_CASE("preprocess-vad and parse-eaf") {
  const auto dir = testing::scratch_dir("cli_vad");
  intent::text::write_file(dir / "a.vad", "# participant=A rate_hz=1 t0_s=0\n0\n1\n0\n1\n1\n0\n0\n0\n1\n1\n");
  const auto r = invoke({"preprocess-vad", (dir / "a.vad").string(), (dir / "clean.vad").string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("onsets 2\n") != std::string::npos);
  CHECK(r.out.find("onset 1\n") != std::string::npos);
  CHECK(r.out.find("onset 8\n") != std::string::npos);
  CHECK(std::filesystem::exists(dir / "clean.vad"));
  intent::text::write_file(dir / "bad.vad", "# participant=A rate_hz=1 t0_s=0\n0\n7\n");
  const auto bad = invoke({"preprocess-vad", (dir / "bad.vad").string()});
  CHECK(bad.code == 3);
  CHECK(bad.err.find("bad.vad:3") != std::string::npos);

  const auto e = invoke({"parse-eaf", testing::fixture("eaf/P01.eaf").string()});
  REQUIRE(e.code == 0);
  CHECK(e.out.rfind("# participant=P01\n", 0) == 0);
  const auto f = invoke({"parse-eaf", testing::fixture("eaf/P01.eaf").string(), (dir / "p01.txt").string()});
  CHECK(f.out.find("tier INTS_start 2") != std::string::npos);
  CHECK(f.out.find("cue audible smack/tongue click 1") != std::string::npos);
}

TEST_CASE("inspect-samples") {
  const auto r = invoke({"inspect-samples", "--data", small_scenario().string(), "--test-interval", "400,600",
                         "--experiments", "successful"});
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("participant,experiment,negatives,speech_overlap,silence\n", 0) == 0);
  CHECK(r.out.find("P01,successful,") != std::string::npos);
}

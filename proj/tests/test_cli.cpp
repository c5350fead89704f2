// Copyright 2026 The vtract Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "oracles.hpp"
#include "vtract/fileio.hpp"
#include "vtract/formants.hpp"
#include "vtract/style.hpp"

namespace fs = std::filesystem;
using namespace vtract;

namespace {

struct Run {
  int status;
  std::string out;
};

Run run(const std::string& args, bool merge_stderr = false) {
  const std::string cmd = std::string(VTRACT_CLI) + " " + args + (merge_stderr ? " 2>&1" : " 2>/dev/null");
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  char buf[4096];
  for (std::size_t n; (n = fread(buf, 1, sizeof buf, pipe)) > 0;) out.append(buf, n);
  const int rc = pclose(pipe);
  return {WIFEXITED(rc) ? WEXITSTATUS(rc) : -1, out};
}

Run run_stderr(const std::string& args) { return run(args, true); }

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("vtract_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream lines(text);
  for (std::string line; std::getline(lines, line);) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
    rows.push_back(cells);
  }
  return rows;
}

std::size_t count_wavs(const fs::path& dir) {
  std::size_t n = 0;
  for (const auto& e : fs::recursive_directory_iterator(dir)) n += e.path().extension() == ".wav";
  return n;
}

}  // namespace

TEST_CASE("synth-corpus") {
  const auto dir = scratch("synth");
  const auto a = run("synth-corpus --seed 7 --out " + (dir / "a").string());
  const auto b = run("synth-corpus --seed 7 --out " + (dir / "b").string());
  REQUIRE(a.status == 0);
  REQUIRE(b.status == 0);
  CHECK(read_file(dir / "a" / "manifest.json") == read_file(dir / "b" / "manifest.json"));
  CHECK(a.out.find("405 utterances") != std::string::npos);
  CHECK(count_wavs(dir / "a") == 405);

  const auto small = run("synth-corpus --speakers 2 --reps 2 --styles normal --out " + (dir / "c").string());
  CHECK(small.status == 0);
  CHECK(count_wavs(dir / "c") == 4);

  CHECK(run("synth-corpus --out /proc/vtract_cannot_write").status != 0);
  CHECK(run("synth-corpus --styles whisper --out " + (dir / "d").string()).status != 0);
  fs::remove_all(dir);
}

TEST_CASE("analyze") {
  const auto dir = scratch("analyze");

  SUBCASE("uniform tube has no formants") {
    write_file_atomic(dir / "tube.txt", "2\n2\n2\n2\n2\n2\n2\n2\n2\n");
    const auto r = run("analyze --area " + (dir / "tube.txt").string());
    CHECK(r.status == 0);
    CHECK(r.out == "index,frequency_hz,bandwidth_hz\n");
  }
  SUBCASE("two-resonance tract") {
    auto roots = oracle::resonance(700, 80, 8000);
    const auto second = oracle::resonance(1900, 120, 8000);
    roots.insert(roots.end(), second.begin(), second.end());
    const auto areas = reflection_to_area(predictor_to_reflection(PredictorPolynomial(oracle::expand_roots(roots))));
    std::ostringstream text;
    text.precision(17);
    for (double a : areas.areas()) text << a << '\n';
    write_file_atomic(dir / "two.txt", text.str());
    const auto r = run("analyze --area " + (dir / "two.txt").string() + " --cepstra " + (dir / "c.csv").string() +
                       " --spectrum " + (dir / "s.csv").string() + " --spectrum-points 64");
    REQUIRE(r.status == 0);
    const auto rows = csv_rows(r.out);
    REQUIRE(rows.size() == 3);
    CHECK(std::stod(rows[1][1]) == doctest::Approx(700).epsilon(1e-6));
    CHECK(std::stod(rows[1][2]) == doctest::Approx(80).epsilon(1e-6));
    CHECK(std::stod(rows[2][1]) == doctest::Approx(1900).epsilon(1e-6));
    CHECK(std::stod(rows[2][2]) == doctest::Approx(120).epsilon(1e-6));
    CHECK(csv_rows(read_file(dir / "c.csv")).size() == 2);
    CHECK(csv_rows(read_file(dir / "s.csv")).size() == 65);
  }
  SUBCASE("synthetic Normal utterance") {
    REQUIRE(run("synth-corpus --speakers 1 --reps 2 --styles normal --out " + (dir / "c").string()).status == 0);
    const auto manifest = nlohmann::json::parse(read_file(dir / "c" / "manifest.json"));
    const auto& u = manifest.at("utterances").at(0);
    const auto truth = extract_formants(PredictorPolynomial(u.at("filter").get<std::vector<double>>()), 8000.0);
    const auto r = run("analyze --wav " + (dir / "c" / "spk01" / "normal" / "0.wav").string());
    REQUIRE(r.status == 0);
    const auto rows = csv_rows(r.out);
    REQUIRE(rows.size() >= 2);
    const double f1 = truth.formants.at(0).frequency_hz;
    CHECK(std::abs(std::stod(rows[1][1]) - f1) <= 0.02 * f1);
  }
  SUBCASE("malformed inputs") {
    write_file_atomic(dir / "bad.txt", "1.0\n-2\n");
    const auto area = run_stderr("analyze --area " + (dir / "bad.txt").string());
    CHECK(area.status != 0);
    CHECK(area.out.find("line 2") != std::string::npos);

    write_file_atomic(dir / "bad.wav", "RIFF\x10\0\0\0WAVEjunk");
    const auto wav = run_stderr("analyze --wav " + (dir / "bad.wav").string());
    CHECK(wav.status != 0);
    CHECK(wav.out.find("error:") != std::string::npos);

    CHECK(run("analyze").status != 0);
    CHECK(run("analyze --wav a.wav --area b.txt").status != 0);
  }
  fs::remove_all(dir);
}

TEST_CASE("experiment and identify") {
  const auto dir = scratch("experiment");
  const auto corpus = dir / "corpus";
  REQUIRE(run("synth-corpus --seed 3 --out " + corpus.string()).status == 0);

  const auto dtw = run("experiment --corpus " + corpus.string() + " --out " + (dir / "dtw").string());
  REQUIRE(dtw.status == 0);
  const auto rows = csv_rows(read_file(dir / "dtw" / "report.csv"));
  REQUIRE(rows.size() == 6);
  CHECK(rows[1][0] == "normal");
  for (std::size_t i = 2; i < rows.size(); ++i) CHECK(std::stod(rows[1][1]) >= std::stod(rows[i][1]));
  CHECK(dtw.out.find("Recognition rate (dtw)") != std::string::npos);
  CHECK(fs::exists(dir / "dtw" / "displacement.csv"));

  const auto again = run("experiment --corpus " + corpus.string() + " --out " + (dir / "dtw2").string());
  REQUIRE(again.status == 0);
  CHECK(read_file(dir / "dtw" / "report.json") == read_file(dir / "dtw2" / "report.json"));

  const auto hmm = run("experiment --corpus " + corpus.string() + " --recognizer hmm --out " + (dir / "hmm").string());
  REQUIRE(hmm.status == 0);
  CHECK(csv_rows(read_file(dir / "hmm" / "report.csv")).size() == 6);
  CHECK(hmm.out.find("Recognition rate (hmm)") != std::string::npos);

  SUBCASE("identify a training utterance") {
    const auto r = run("identify --models " + (dir / "dtw" / "models").string() + " --input " +
                       (corpus / "spk05" / "normal" / "2.wav").string());
    REQUIRE(r.status == 0);
    const auto ranked = csv_rows(r.out);
    REQUIRE(ranked.size() == 10);
    CHECK(ranked[1][1] == "spk05");
    CHECK(std::stod(ranked[1][2]) == 0.0);

    const auto h = run("identify --recognizer hmm --models " + (dir / "hmm" / "models").string() + " --input " +
                       (corpus / "spk05" / "normal" / "7.wav").string());
    CHECK(h.status == 0);
    CHECK(csv_rows(h.out).size() == 10);
  }
  SUBCASE("failures") {
    CHECK(run("identify --models " + (dir / "none").string() + " --input " +
              (corpus / "spk01" / "normal" / "0.wav").string())
              .status != 0);
    CHECK(run("identify --recognizer hmm --models " + (dir / "dtw" / "models").string() + " --input " +
              (corpus / "spk01" / "normal" / "0.wav").string())
              .status != 0);
    CHECK(run("experiment --out " + (dir / "x").string()).status != 0);
    CHECK(run("experiment --synth --bogus --out " + (dir / "x").string()).status != 0);
    CHECK(run("experiment --synth --train-reps 0,1 --test-reps 1,2 --out " + (dir / "x").string()).status != 0);
  }
  fs::remove_all(dir);
}

TEST_CASE("single enrolled speaker") {
  const auto dir = scratch("single");
  REQUIRE(run("experiment --synth --speakers 1 --no-displacement --out " + dir.string()).status == 0);
  REQUIRE(run("synth-corpus --speakers 1 --seed 99 --out " + (dir / "other").string()).status == 0);
  const auto r = run("identify --models " + (dir / "models").string() + " --input " +
                     (dir / "other" / "spk01" / "shout" / "3.wav").string());
  REQUIRE(r.status == 0);
  const auto rows = csv_rows(r.out);
  REQUIRE(rows.size() == 2);
  CHECK(rows[1][1] == "spk01");
  fs::remove_all(dir);
}

TEST_CASE("held-out Normal utterances identify their speaker") {
  const auto dir = scratch("heldout");
  std::size_t correct = 0, total = 0;
  for (int seed = 1; seed <= 3; ++seed) {
    const auto sd = dir / std::to_string(seed);
    REQUIRE(run("synth-corpus --seed " + std::to_string(seed) + " --styles normal --out " + (sd / "c").string())
                .status == 0);
    REQUIRE(run("experiment --no-displacement --corpus " + (sd / "c").string() + " --out " + (sd / "r").string())
                .status == 0);
    for (int s = 1; s <= 9; ++s) {
      const std::string id = "spk0" + std::to_string(s);
      for (int rep = 5; rep <= 8; ++rep) {
        const auto r = run("identify --models " + (sd / "r" / "models").string() + " --input " +
                           (sd / "c" / id / "normal" / (std::to_string(rep) + ".wav")).string());
        REQUIRE(r.status == 0);
        correct += csv_rows(r.out).at(1).at(1) == id;
        ++total;
      }
    }
  }
  CHECK(static_cast<double>(correct) >= 0.95 * static_cast<double>(total));
  fs::remove_all(dir);
}

TEST_CASE("configuration surface") {
  const auto dir = scratch("config");
  const auto help = run("experiment --help");
  CHECK(help.status == 0);
  for (const char* flag : {"--seed", "--speakers", "--reps", "--order", "--symbols", "--states", "--recognizer"})
    CHECK(help.out.find(flag) != std::string::npos);
  CHECK(help.out.find("[32]") != std::string::npos);
  CHECK(help.out.find("[0,1,2,3,4]") != std::string::npos);

  write_file_atomic(dir / "cfg.ini", "[synth-corpus]\nspeakers=2\nreps=3\nstyles=\"normal\"\n");
  const auto from_file = run_stderr("--config " + (dir / "cfg.ini").string() + " synth-corpus --out " +
                                    (dir / "a").string());
  CHECK(from_file.status == 0);
  CHECK(from_file.out.find("speakers=2") != std::string::npos);
  CHECK(count_wavs(dir / "a") == 6);

  const auto overridden = run("--config " + (dir / "cfg.ini").string() + " synth-corpus --reps 2 --out " +
                              (dir / "b").string());
  CHECK(overridden.status == 0);
  CHECK(count_wavs(dir / "b") == 4);

  CHECK(run("synth-corpus --out " + (dir / "c").string() + " --nonsense 3").status != 0);
  CHECK(run("").status != 0);
  fs::remove_all(dir);
}

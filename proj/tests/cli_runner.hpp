#pragma once

// Runs the extcalc executable and replays the golden transcript cases.

#include <sys/wait.h>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace cli {

struct Run {
  int exit_code = -1;
  std::string out;  // stdout only unless merge_stderr
};

inline std::string quote(const std::string& s) {
  std::string q = "'";
  for (char c : s) {
    if (c == '\'') {
      q += "'\\''";
    } else {
      q += c;
    }
  }
  return q + "'";
}

inline Run run(const std::string& exe, const std::vector<std::string>& args, bool merge_stderr = false) {
  std::string cmd = quote(exe);
  for (const auto& a : args) cmd += " " + quote(a);
  cmd += merge_stderr ? " 2>&1" : " 2>/dev/null";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  const int status = pclose(p);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct GoldenCase {
  std::string file;
  int exit_code = 0;
  std::vector<std::string> args;
};

/// Tab-separated lines of tests/golden/cases.txt; '#' lines are comments.
inline std::vector<GoldenCase> golden_cases(const std::string& golden_dir, const std::string& manifest_dir) {
  std::vector<GoldenCase> out;
  std::istringstream in(slurp(golden_dir + "/cases.txt"));
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      const std::size_t tab = line.find('\t', start);
      fields.push_back(line.substr(start, tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    if (fields.size() < 3) continue;
    GoldenCase c;
    c.file = fields[0];
    c.exit_code = std::stoi(fields[1]);
    for (std::size_t i = 2; i < fields.size(); ++i) {
      std::string a = fields[i];
      const std::string tag = "@MANIFESTS@";
      if (auto at = a.find(tag); at != std::string::npos) a.replace(at, tag.size(), manifest_dir);
      c.args.push_back(a);
    }
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace cli

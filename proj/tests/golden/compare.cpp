// Compares two JSON reports: numbers to a relative tolerance, everything else exactly.
// Volatile keys (timings, timestamps, the command line) are ignored.

#include <cmath>
#include <fstream>
#include <iostream>
#include <set>
#include <string>

#include <nlohmann/json.hpp>

using json = nlohmann::json;

namespace {

const std::set<std::string> kIgnored{"provenance", "seconds", "command"};
constexpr double kRelTol = 1e-9;
int mismatches = 0;

void report(const std::string& path, const std::string& what) {
  if (++mismatches <= 20) std::cerr << path << ": " << what << "\n";
}

void compare(const json& a, const json& b, const std::string& path) {
  if (a.is_number() && b.is_number()) {
    const double x = a.get<double>(), y = b.get<double>();
    if (std::abs(x - y) > kRelTol * std::max({std::abs(x), std::abs(y), 1e-300}))
      report(path, a.dump() + " != " + b.dump());
    return;
  }
  if (a.type() != b.type()) return report(path, "type differs");
  if (a.is_object()) {
    for (auto it = a.begin(); it != a.end(); ++it) {
      if (kIgnored.count(it.key())) continue;
      if (!b.contains(it.key())) {
        report(path + "/" + it.key(), "missing");
        continue;
      }
      compare(it.value(), b.at(it.key()), path + "/" + it.key());
    }
    for (auto it = b.begin(); it != b.end(); ++it)
      if (!kIgnored.count(it.key()) && !a.contains(it.key())) report(path + "/" + it.key(), "unexpected");
  } else if (a.is_array()) {
    if (a.size() != b.size()) return report(path, "length " + std::to_string(a.size()) + " != " + std::to_string(b.size()));
    for (std::size_t i = 0; i < a.size(); ++i) compare(a[i], b[i], path + "/" + std::to_string(i));
  } else if (a != b) {
    report(path, a.dump() + " != " + b.dump());
  }
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 3) {
    std::cerr << "usage: golden_compare expected.json actual.json\n";
    return 2;
  }
  std::ifstream fa(argv[1]), fb(argv[2]);
  if (!fa || !fb) {
    std::cerr << "cannot open input\n";
    return 2;
  }
  const json a = json::parse(fa), b = json::parse(fb);
  compare(a, b, "");
  if (mismatches) std::cerr << mismatches << " mismatches\n";
  return mismatches ? 1 : 0;
}

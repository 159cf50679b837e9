// Writes a deterministic token embedding file covering every token of the
// given corpus files, plus the "<unk>" key. Vectors come from a generator
// seeded by the token bytes, so the file does not depend on input order.
//
//   make-fixture-embeddings <out> <dim> <jsonl>...

#include <cstdint>
#include <fstream>
#include <iostream>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "intent_eval/corpus.hpp"
#include "intent_eval/embeddings.hpp"
#include "intent_eval/semantic.hpp"
#include "intent_eval/text.hpp"

using namespace intent_eval;

static std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

int main(int argc, char** argv) {
  if (argc < 4) {
    std::cerr << "usage: make-fixture-embeddings <out> <dim> <jsonl>...\n";
    return 2;
  }
  try {
    const std::size_t dim = std::stoul(argv[2]);
    std::set<std::string> types{std::string(unknown_token_key)};
    for (int a = 3; a < argc; ++a) {
      detail::for_each_jsonl(argv[a], [&](const nlohmann::json& obj, std::size_t) {
        for (const char* key : {"text", "summary"}) {
          if (auto it = obj.find(key); it != obj.end() && it->is_string()) {
            for (auto& t : tokenize(it->get<std::string>())) types.insert(std::move(t));
          }
        }
        if (auto it = obj.find("phrases"); it != obj.end() && it->is_array()) {
          for (const auto& p : *it)
            for (auto& t : tokenize(p.get<std::string>())) types.insert(std::move(t));
        }
      });
    }
    EmbeddingTable table(dim, EmbeddingKind::token);
    std::vector<double> v(dim);
    for (const auto& t : types) {
      std::mt19937_64 gen(fnv1a(t));
      // Two decimal places keep the committed file short and readable.
      for (auto& x : v) x = static_cast<double>(static_cast<std::int64_t>(gen() % 201) - 100) / 100.0;
      table.add(t, v);
    }
    std::ofstream out(argv[1], std::ios::binary | std::ios::trunc);
    write_embeddings(table, out);
    std::cout << "wrote " << table.size() << " vectors to " << argv[1] << '\n';
  } catch (const Error& e) {
    std::cerr << "error[" << e.code() << "]: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

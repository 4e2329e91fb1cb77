#include "sectore/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace sectore {

namespace {

std::string strip_suffix(std::string path) {
  for (const char* suffix : {".meta.json", ".params.bin"}) {
    const std::size_t n = std::strlen(suffix);
    if (path.size() > n && path.compare(path.size() - n, n, suffix) == 0)
      return path.substr(0, path.size() - n);
  }
  return path;
}

void byteswap_doubles(std::vector<double>& v) {
  for (double& x : v) {
    std::uint64_t bits;
    std::memcpy(&bits, &x, 8);
    bits = __builtin_bswap64(bits);
    std::memcpy(&x, &bits, 8);
  }
}

constexpr bool host_little_endian() {
  return std::endian::native == std::endian::little;
}

}  // namespace

void save_checkpoint(const std::string& base, const ModelParams& params,
                     Norm norm, const AblationConfig& ablation,
                     std::uint64_t step) {
  nlohmann::json meta{
      {"model", "sectore"},
      {"dimension", params.dim()},
      {"n_entities", params.n_entities()},
      {"n_relations", params.n_relations()},
      {"beta", params.beta()},
      {"norm", norm_name(norm)},
      {"use_modulus", ablation.use_modulus},
      {"use_phase", ablation.use_phase},
      {"use_bump", ablation.use_bump},
      {"step", step},
  };
  {
    std::ofstream out(base + ".meta.json", std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + base + ".meta.json");
    out << meta.dump(2) << '\n';
  }
  std::ofstream out(base + ".params.bin", std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + base + ".params.bin");
  const auto flat = params.flat();
  if (host_little_endian()) {
    out.write(reinterpret_cast<const char*>(flat.data()),
              static_cast<std::streamsize>(flat.size() * sizeof(double)));
  } else {
    std::vector<double> tmp(flat.begin(), flat.end());
    byteswap_doubles(tmp);
    out.write(reinterpret_cast<const char*>(tmp.data()),
              static_cast<std::streamsize>(tmp.size() * sizeof(double)));
  }
  if (!out) throw std::runtime_error("write failed: " + base + ".params.bin");
}

Checkpoint load_checkpoint(const std::string& path) {
  const std::string base = strip_suffix(path);
  std::ifstream meta_in(base + ".meta.json", std::ios::binary);
  if (!meta_in)
    throw std::runtime_error("cannot open checkpoint metadata: " + base +
                             ".meta.json");
  nlohmann::json meta = nlohmann::json::parse(meta_in);

  Checkpoint ck;
  const auto dim = meta.at("dimension").get<std::size_t>();
  const auto n_ent = meta.at("n_entities").get<std::size_t>();
  const auto n_rel = meta.at("n_relations").get<std::size_t>();
  ck.params = ModelParams(n_ent, n_rel, dim, meta.at("beta").get<double>());
  ck.norm = norm_from_name(meta.at("norm").get<std::string>());
  ck.ablation.use_modulus = meta.at("use_modulus").get<bool>();
  ck.ablation.use_phase = meta.at("use_phase").get<bool>();
  ck.ablation.use_bump = meta.at("use_bump").get<bool>();
  ck.step = meta.at("step").get<std::uint64_t>();

  std::ifstream in(base + ".params.bin", std::ios::binary);
  if (!in)
    throw std::runtime_error("cannot open checkpoint parameters: " + base +
                             ".params.bin");
  auto flat = ck.params.flat();
  in.read(reinterpret_cast<char*>(flat.data()),
          static_cast<std::streamsize>(flat.size() * sizeof(double)));
  if (in.gcount() !=
      static_cast<std::streamsize>(flat.size() * sizeof(double))) {
    throw std::runtime_error(base + ".params.bin is truncated: expected " +
                             std::to_string(flat.size()) + " binary64 values");
  }
  char extra;
  if (in.read(&extra, 1))
    throw std::runtime_error(base + ".params.bin has trailing bytes beyond " +
                             std::to_string(flat.size()) + " binary64 values");
  if (!host_little_endian()) {
    std::vector<double> tmp(flat.begin(), flat.end());
    byteswap_doubles(tmp);
    std::copy(tmp.begin(), tmp.end(), flat.begin());
  }
  return ck;
}

}  // namespace sectore

#include "diffhash/model_io.hpp"

#include <openssl/evp.h>

#include <fstream>
#include <sstream>

#include "diffhash/error.hpp"
#include "json.hpp"

namespace diffhash {

using Json = nlohmann::ordered_json;

namespace {

Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const auto r = m.row(i);
    rows.push_back(Json(std::vector<double>(r.begin(), r.end())));
  }
  return rows;
}

Matrix matrix_from_json(const Json& j, std::size_t rows, std::size_t cols, const char* name) {
  if (!j.is_array() || j.size() != rows) {
    throw InputError(std::string("model field '") + name + "' must have " + std::to_string(rows) + " rows");
  }
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    const Json& r = j[i];
    if (!r.is_array() || r.size() != cols) {
      throw InputError(std::string("model field '") + name + "' row " + std::to_string(i) + " must have " +
                       std::to_string(cols) + " entries");
    }
    for (std::size_t k = 0; k < cols; ++k) m(i, k) = r[k].get<double>();
  }
  return m;
}

std::vector<double> vector_from_json(const Json& j, std::size_t size, const char* name) {
  if (!j.is_array() || j.size() != size) {
    throw InputError(std::string("model field '") + name + "' must have " + std::to_string(size) + " entries");
  }
  return j.get<std::vector<double>>();
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::string serialize_model(const ModelFile& file) {
  Json j;
  j["format"] = "diffhash-model";
  j["version"] = ModelFile::kVersion;
  std::visit(
      [&](const auto& mdl) {
        using T = std::decay_t<decltype(mdl)>;
        if constexpr (std::is_same_v<T, LinearHashModel>) {
          j["type"] = "linear";
          j["m"] = mdl.m;
          j["n"] = mdl.n;
          j["alpha"] = mdl.alpha;
          j["projections"] = matrix_to_json(mdl.projections);
          j["thresholds"] = mdl.thresholds;
        } else {
          j["type"] = "kernel";
          j["m"] = mdl.m;
          j["n"] = mdl.n;
          j["l"] = mdl.l;
          j["alpha"] = mdl.alpha;
          j["seed"] = mdl.seed;
          Json k;
          k["kind"] = std::string(to_string(mdl.kernel.kind));
          if (mdl.kernel.kind == KernelKind::gaussian_mahalanobis) {
            k["gamma"] = mdl.kernel.gamma;
            k["exponent_mode"] = std::string(to_string(mdl.kernel.exponent_mode));
            k["metric"] = matrix_to_json(mdl.kernel.metric.matrix());
          }
          j["kernel"] = std::move(k);
          j["basis"] = matrix_to_json(mdl.basis);
          j["coefficients"] = matrix_to_json(mdl.coefficients);
          j["thresholds"] = mdl.thresholds;
        }
      },
      file.model);

  Json inputs = Json::array();
  for (const InputDigest& d : file.provenance.inputs) {
    inputs.push_back(Json{{"role", d.role}, {"path", d.path}, {"sha256", d.sha256}});
  }
  j["provenance"] = Json{{"created_at", file.provenance.created_at}, {"inputs", std::move(inputs)}};
  return j.dump(1) + "\n";
}

ModelFile parse_model(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("model file is not valid JSON: ") + e.what());
  }
  try {
    if (j.value("format", "") != "diffhash-model") throw InputError("not a diffhash model file");
    if (j.at("version").get<int>() != ModelFile::kVersion) {
      throw InputError("unsupported model version " + j.at("version").dump());
    }
    ModelFile out;
    const std::string type = j.at("type").get<std::string>();
    const auto m = j.at("m").get<std::size_t>();
    const auto n = j.at("n").get<std::size_t>();
    if (m == 0 || n == 0) throw InputError("model dimensions must be positive");
    if (type == "linear") {
      LinearHashModel mdl;
      mdl.m = m;
      mdl.n = n;
      if (m > n) throw InputError("linear model requires m <= n");
      mdl.alpha = j.at("alpha").get<double>();
      mdl.projections = matrix_from_json(j.at("projections"), m, n, "projections");
      mdl.thresholds = vector_from_json(j.at("thresholds"), m, "thresholds");
      out.model = std::move(mdl);
    } else if (type == "kernel") {
      KernelHashModel mdl;
      mdl.m = m;
      mdl.n = n;
      mdl.l = j.at("l").get<std::size_t>();
      if (m > mdl.l) throw InputError("kernel model requires m <= l");
      mdl.alpha = j.at("alpha").get<double>();
      mdl.seed = j.at("seed").get<std::uint64_t>();
      const Json& k = j.at("kernel");
      const KernelKind kind = parse_kernel_kind(k.at("kind").get<std::string>());
      if (kind == KernelKind::linear) {
        mdl.kernel = KernelSpec::linear(n);
      } else {
        mdl.kernel = KernelSpec::gaussian_with_metric(SymMatrix(matrix_from_json(k.at("metric"), n, n, "metric")),
                                                      k.at("gamma").get<double>(),
                                                      parse_exponent_mode(k.at("exponent_mode").get<std::string>()));
      }
      mdl.basis = matrix_from_json(j.at("basis"), mdl.l, n, "basis");
      mdl.coefficients = matrix_from_json(j.at("coefficients"), m, mdl.l, "coefficients");
      mdl.thresholds = vector_from_json(j.at("thresholds"), m, "thresholds");
      out.model = std::move(mdl);
    } else {
      throw InputError("unknown model type '" + type + "'");
    }
    if (j.contains("provenance")) {
      const Json& p = j.at("provenance");
      out.provenance.created_at = p.value("created_at", "");
      for (const Json& d : p.value("inputs", Json::array())) {
        out.provenance.inputs.push_back(
            {d.at("role").get<std::string>(), d.at("path").get<std::string>(), d.at("sha256").get<std::string>()});
      }
    }
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed model file: ") + e.what());
  }
}

void save_model(const ModelFile& file, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write " + path.string());
  out << serialize_model(file);
  if (!out) throw InputError("write failed for " + path.string());
}

ModelFile load_model(const std::filesystem::path& path) {
  try {
    return parse_model(read_file(path));
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 computation failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) {
    hex.push_back(kHex[digest[i] >> 4]);
    hex.push_back(kHex[digest[i] & 0xF]);
  }
  return hex;
}

std::string sha256_file(const std::filesystem::path& path) { return sha256_hex(read_file(path)); }

}  // namespace diffhash

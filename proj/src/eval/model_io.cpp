#include "eval/model_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include <fmt/format.h>

#include "common/error.hpp"
#include "common/random.hpp"

namespace faasprof {

namespace {

class Writer {
public:
  void u8(std::uint8_t v) { out_.push_back(static_cast<char>(v)); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void str(const std::string& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    out_ += s;
  }
  void strs(const std::vector<std::string>& v) {
    u32(static_cast<std::uint32_t>(v.size()));
    for (const auto& s : v) str(s);
  }
  std::string& bytes() { return out_; }

private:
  std::string out_;
};

class Reader {
public:
  Reader(const std::string& b, std::string origin) : b_(b), origin_(std::move(origin)) {}

  std::uint8_t u8() {
    need(1);
    return static_cast<std::uint8_t>(b_[pos_++]);
  }
  std::uint32_t u32() {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(u8()) << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(u8()) << (8 * i);
    return v;
  }
  std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string str() {
    const auto n = u32();
    need(n);
    std::string s = b_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  std::vector<std::string> strs() {
    const auto n = count();
    std::vector<std::string> v;
    for (std::uint32_t i = 0; i < n; ++i) v.push_back(str());
    return v;
  }
  // element counts are bounded by the remaining bytes so a corrupt count
  // cannot trigger a huge allocation
  std::uint32_t count() {
    const auto n = u32();
    if (n > b_.size() - pos_) fail("element count exceeds payload");
    return n;
  }
  bool done() const { return pos_ == b_.size(); }
  [[noreturn]] void fail(const std::string& what) const {
    throw FormatError(fmt::format("{}: malformed model payload at byte {}: {}", origin_, pos_, what));
  }

private:
  void need(std::size_t n) {
    if (b_.size() - pos_ < n) fail("unexpected end");
  }
  const std::string& b_;
  std::string origin_;
  std::size_t pos_ = 0;
};

void write_recipe(Writer& w, const FittedRecipe& r) {
  w.u8(r.fitted ? 1 : 0);
  w.strs(r.recipe.features);
  w.u32(static_cast<std::uint32_t>(r.recipe.transforms.size()));
  for (const auto& t : r.recipe.transforms) {
    w.u8(static_cast<std::uint8_t>(t.kind));
    w.str(t.column);
    w.i32(t.degree);
    w.str(t.predicate.column);
    w.u8(static_cast<std::uint8_t>(t.predicate.op));
    w.str(t.predicate.value);
  }
  w.u32(static_cast<std::uint32_t>(r.categories.size()));
  for (const auto& c : r.categories) w.strs(c);
  w.u32(static_cast<std::uint32_t>(r.scaling.size()));
  for (const auto& s : r.scaling) {
    w.u32(static_cast<std::uint32_t>(s.size()));
    for (const auto& [name, ms] : s) {
      w.str(name);
      w.f64(ms.first);
      w.f64(ms.second);
    }
  }
  w.strs(r.output_features);
}

FittedRecipe read_recipe(Reader& r) {
  FittedRecipe f;
  f.fitted = r.u8() != 0;
  f.recipe.features = r.strs();
  const auto nt = r.count();
  for (std::uint32_t i = 0; i < nt; ++i) {
    Transform t;
    const auto kind = r.u8();
    if (kind > static_cast<std::uint8_t>(TransformKind::normalize)) r.fail("unknown transform");
    t.kind = static_cast<TransformKind>(kind);
    t.column = r.str();
    t.degree = r.i32();
    t.predicate.column = r.str();
    const auto op = r.u8();
    if (op > static_cast<std::uint8_t>(CompareOp::ge)) r.fail("unknown comparison");
    t.predicate.op = static_cast<CompareOp>(op);
    t.predicate.value = r.str();
    f.recipe.transforms.push_back(std::move(t));
  }
  const auto nc = r.count();
  for (std::uint32_t i = 0; i < nc; ++i) f.categories.push_back(r.strs());
  const auto ns = r.count();
  for (std::uint32_t i = 0; i < ns; ++i) {
    std::vector<std::pair<std::string, std::pair<double, double>>> s;
    const auto n = r.count();
    for (std::uint32_t k = 0; k < n; ++k) {
      auto name = r.str();
      const double mean = r.f64();
      const double sd = r.f64();
      s.push_back({std::move(name), {mean, sd}});
    }
    f.scaling.push_back(std::move(s));
  }
  f.output_features = r.strs();
  return f;
}

}  // namespace

std::string serialize_model(const RegressionModel& m) {
  Writer w;
  w.str(std::string(to_string(m.algorithm)));
  w.u32(static_cast<std::uint32_t>(m.hp.values.size()));
  for (const auto& [k, v] : m.hp.values) {
    w.str(k);
    w.f64(v);
  }
  w.u32(static_cast<std::uint32_t>(m.hp.labels.size()));
  for (const auto& [k, v] : m.hp.labels) {
    w.str(k);
    w.str(v);
  }
  w.strs(m.features);
  write_recipe(w, m.recipe);
  w.f64(m.validation_mape);
  if (const auto* lin = std::get_if<LinearParams>(&m.params)) {
    w.u8(0);
    w.u32(static_cast<std::uint32_t>(lin->coef.size()));
    for (double c : lin->coef) w.f64(c);
    w.f64(lin->intercept);
  } else {
    const auto& e = std::get<EnsembleParams>(m.params);
    w.u8(1);
    w.u8(e.average ? 1 : 0);
    w.f64(e.base);
    w.u32(static_cast<std::uint32_t>(e.trees.size()));
    for (const auto& t : e.trees) {
      w.u32(static_cast<std::uint32_t>(t.nodes.size()));
      for (const auto& n : t.nodes) {
        w.i32(n.feature);
        w.f64(n.threshold);
        w.i32(n.left);
        w.i32(n.right);
        w.f64(n.value);
      }
    }
  }
  const std::string payload = std::move(w.bytes());

  Writer out;
  out.bytes().append(kModelMagic, sizeof kModelMagic);
  out.u32(kModelVersion);
  out.u64(payload.size());
  out.bytes() += payload;
  out.u64(fnv1a(payload));
  return std::move(out.bytes());
}

RegressionModel deserialize_model(const std::string& bytes, const std::string& origin) {
  constexpr std::size_t kHeader = sizeof kModelMagic + 4 + 8;
  const std::size_t magic_n = std::min(bytes.size(), sizeof kModelMagic);
  if (std::memcmp(bytes.data(), kModelMagic, magic_n) != 0) throw FormatError(fmt::format("{}: not a model file", origin));
  if (bytes.size() < sizeof kModelMagic + 4) throw ChecksumError(fmt::format("{}: truncated model file", origin));
  Reader head(bytes, origin);
  for (std::size_t i = 0; i < sizeof kModelMagic; ++i) head.u8();
  const auto version = head.u32();
  if (version != kModelVersion)
    throw VersionError(fmt::format("{}: model format version {} (this build reads {})", origin, version, kModelVersion));
  if (bytes.size() < kHeader + 8) throw ChecksumError(fmt::format("{}: truncated model file", origin));
  const auto length = head.u64();
  if (length != bytes.size() - kHeader - 8)
    throw ChecksumError(fmt::format("{}: payload length {} does not match file size (truncated or corrupt)", origin,
                                    length));
  const std::string payload = bytes.substr(kHeader, length);
  const std::string trailer = bytes.substr(kHeader + length);
  Reader tail(trailer, origin);
  if (tail.u64() != fnv1a(payload)) throw ChecksumError(fmt::format("{}: checksum mismatch", origin));

  Reader r(payload, origin);
  RegressionModel m;
  try {
    m.algorithm = parse_algorithm(r.str());
  } catch (const ConfigError& e) {
    r.fail(e.what());
  }
  m.hp.algorithm = m.algorithm;
  const auto nv = r.count();
  for (std::uint32_t i = 0; i < nv; ++i) {
    auto k = r.str();
    m.hp.values[k] = r.f64();
  }
  const auto nl = r.count();
  for (std::uint32_t i = 0; i < nl; ++i) {
    auto k = r.str();
    m.hp.labels[k] = r.str();
  }
  m.features = r.strs();
  m.recipe = read_recipe(r);
  m.validation_mape = r.f64();
  const auto tag = r.u8();
  if (tag == 0) {
    LinearParams p;
    const auto n = r.count();
    for (std::uint32_t i = 0; i < n; ++i) p.coef.push_back(r.f64());
    p.intercept = r.f64();
    if (p.coef.size() != m.features.size()) r.fail("coefficient count differs from feature count");
    m.params = std::move(p);
  } else if (tag == 1) {
    EnsembleParams e;
    e.average = r.u8() != 0;
    e.base = r.f64();
    const auto nt = r.count();
    for (std::uint32_t t = 0; t < nt; ++t) {
      Tree tree;
      const auto nn = r.count();
      if (nn == 0) r.fail("empty tree");
      for (std::uint32_t k = 0; k < nn; ++k) {
        TreeNode n;
        n.feature = r.i32();
        n.threshold = r.f64();
        n.left = r.i32();
        n.right = r.i32();
        n.value = r.f64();
        tree.nodes.push_back(n);
      }
      // children must point forward so prediction terminates
      for (std::size_t k = 0; k < tree.nodes.size(); ++k) {
        const auto& n = tree.nodes[k];
        if (n.feature < 0) continue;
        const auto sz = static_cast<int>(tree.nodes.size());
        if (static_cast<std::size_t>(n.feature) >= m.features.size() || n.left <= static_cast<int>(k) ||
            n.right <= static_cast<int>(k) || n.left >= sz || n.right >= sz)
          r.fail("invalid tree node");
      }
      e.trees.push_back(std::move(tree));
    }
    m.params = std::move(e);
  } else {
    r.fail("unknown parameter block");
  }
  if (!r.done()) r.fail("trailing bytes");
  return m;
}

void save_model(const RegressionModel& m, const std::string& path) {
  const std::string bytes = serialize_model(m);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError(fmt::format("cannot write model file '{}'", path));
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw IoError(fmt::format("error writing model file '{}'", path));
}

RegressionModel load_model(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError(fmt::format("cannot open model file '{}'", path));
  const std::string bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  return deserialize_model(bytes, path);
}

}  // namespace faasprof

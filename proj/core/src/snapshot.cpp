#include "fbve/snapshot.hpp"

#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "fbve/config.hpp"
#include "fbve/errors.hpp"

namespace fbve::io {

using nlohmann::json;

namespace {

constexpr char kMagic[8] = {'F', 'B', 'V', 'E', 'S', 'N', 'P', '1'};

void put_u64(std::string& out, std::uint64_t x) {
  for (int b = 0; b < 8; ++b) out.push_back(static_cast<char>((x >> (8 * b)) & 0xff));
}

std::uint64_t get_u64(const unsigned char* p) {
  std::uint64_t x = 0;
  for (int b = 0; b < 8; ++b) x |= static_cast<std::uint64_t>(p[b]) << (8 * b);
  return x;
}

void put_doubles(std::string& out, const std::vector<double>& xs) {
  for (double x : xs) {
    std::uint64_t bits;
    std::memcpy(&bits, &x, 8);
    put_u64(out, bits);
  }
}

void get_doubles(const unsigned char* p, std::vector<double>& xs) {
  for (auto& x : xs) {
    const std::uint64_t bits = get_u64(p);
    std::memcpy(&x, &bits, 8);
    p += 8;
  }
}

}  // namespace

std::string encode_snapshot(const Snapshot& snap) {
  const Grid& g = snap.state.grid();
  if (!(snap.rho0.grid() == g)) throw Error("snapshot rho0 grid does not match the state");
  std::string payload;
  payload.reserve(5 * g.nodes() * 8);
  put_doubles(payload, snap.state.u.values());
  put_doubles(payload, snap.state.v.values());
  put_doubles(payload, snap.rho0.values());

  json h;
  h["format"] = "fbve-snapshot";
  h["version"] = 1;
  h["n1"] = g.n1;
  h["n2"] = g.n2;
  h["t"] = snap.state.t;
  h["endianness"] = "little";
  h["dtype"] = "float64";
  h["layout"] = "component,i,j";
  h["fields"] = json::array({{{"name", "displacement"}, {"components", 2}},
                             {{"name", "velocity"}, {"components", 2}},
                             {{"name", "rho0"}, {"components", 1}}});
  h["config_hash"] = hex64(snap.config_hash);
  h["config"] = snap.config_json.empty() ? json() : json::parse(snap.config_json);
  h["payload_bytes"] = payload.size();
  h["payload_checksum"] = hex64(fnv1a64(payload.data(), payload.size()));
  const std::string header = h.dump();

  std::string out(kMagic, 8);
  put_u64(out, header.size());
  out += header;
  out += payload;
  return out;
}

Snapshot decode_snapshot(const std::string& bytes) {
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  if (bytes.size() < 16 || std::memcmp(p, kMagic, 8) != 0)
    throw CorruptFileError("snapshot: bad magic");
  const std::uint64_t hlen = get_u64(p + 8);
  if (hlen > bytes.size() - 16) throw CorruptFileError("snapshot: truncated header");
  json h;
  try {
    h = json::parse(bytes.substr(16, hlen));
  } catch (const json::exception& e) {
    throw CorruptFileError(std::string("snapshot: unreadable header: ") + e.what());
  }

  Snapshot s;
  std::size_t expected = 0;
  try {
    const Grid g(h.at("n1").get<int>(), h.at("n2").get<int>());
    expected = 5 * g.nodes() * 8;
    if (h.at("payload_bytes").get<std::size_t>() != expected)
      throw CorruptFileError("snapshot: payload length disagrees with grid");
    s.state.u = VectorField(g);
    s.state.v = VectorField(g);
    s.rho0 = ScalarField(g);
    s.state.t = h.at("t").get<double>();
    s.config_hash = std::stoull(h.at("config_hash").get<std::string>(), nullptr, 16);
    if (!h.at("config").is_null()) s.config_json = h.at("config").dump();
  } catch (const CorruptFileError&) {
    throw;
  } catch (const std::exception& e) {
    throw CorruptFileError(std::string("snapshot: malformed header: ") + e.what());
  }

  const std::size_t off = 16 + hlen;
  if (bytes.size() - off != expected) throw CorruptFileError("snapshot: payload truncated or padded");
  if (hex64(fnv1a64(p + off, expected)) != h.at("payload_checksum").get<std::string>())
    throw CorruptFileError("snapshot: payload checksum mismatch");
  const std::size_t vec = 2 * s.rho0.values().size() * 8;
  get_doubles(p + off, s.state.u.values());
  get_doubles(p + off + vec, s.state.v.values());
  get_doubles(p + off + 2 * vec, s.rho0.values());
  return s;
}

void write_snapshot(const std::string& path, const Snapshot& snap) {
  const std::string bytes = encode_snapshot(snap);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(path + ": cannot open for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(path + ": write failed");
}

Snapshot read_snapshot(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(path + ": cannot open snapshot");
  std::stringstream ss;
  ss << in.rdbuf();
  return decode_snapshot(ss.str());
}

}  // namespace fbve::io

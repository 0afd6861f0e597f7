#pragma once

// JSON schemas for curves and domains, report serialization, and the
// git-style content hash embedded in reports for provenance.

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "mobius/curve.hpp"
#include "mobius/domain.hpp"
#include "mobius/mc.hpp"
#include "mobius/renorm.hpp"

namespace mobius::io {

using Json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// SHA-1 (for git blob hashes: "blob <len>\0<content>").

namespace detail {

struct Sha1 {
  std::uint32_t h[5] = {0x67452301, 0xEFCDAB89, 0x98BADCFE, 0x10325476, 0xC3D2E1F0};
  std::uint64_t total = 0;
  unsigned char buf[64];
  size_t fill = 0;

  static std::uint32_t rol(std::uint32_t x, int n) { return (x << n) | (x >> (32 - n)); }

  void block(const unsigned char* p) {
    std::uint32_t w[80];
    for (int i = 0; i < 16; ++i)
      w[i] = (p[4 * i] << 24) | (p[4 * i + 1] << 16) | (p[4 * i + 2] << 8) | p[4 * i + 3];
    for (int i = 16; i < 80; ++i) w[i] = rol(w[i - 3] ^ w[i - 8] ^ w[i - 14] ^ w[i - 16], 1);
    std::uint32_t a = h[0], b = h[1], c = h[2], d = h[3], e = h[4];
    for (int i = 0; i < 80; ++i) {
      std::uint32_t f, k;
      if (i < 20) {
        f = (b & c) | (~b & d);
        k = 0x5A827999;
      } else if (i < 40) {
        f = b ^ c ^ d;
        k = 0x6ED9EBA1;
      } else if (i < 60) {
        f = (b & c) | (b & d) | (c & d);
        k = 0x8F1BBCDC;
      } else {
        f = b ^ c ^ d;
        k = 0xCA62C1D6;
      }
      std::uint32_t t = rol(a, 5) + f + e + k + w[i];
      e = d;
      d = c;
      c = rol(b, 30);
      b = a;
      a = t;
    }
    h[0] += a;
    h[1] += b;
    h[2] += c;
    h[3] += d;
    h[4] += e;
  }

  void update(const void* data, size_t len) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    total += len;
    while (len > 0) {
      size_t take = std::min(len, 64 - fill);
      std::memcpy(buf + fill, p, take);
      fill += take;
      p += take;
      len -= take;
      if (fill == 64) {
        block(buf);
        fill = 0;
      }
    }
  }

  std::string hex() {
    std::uint64_t bits = total * 8;
    unsigned char pad = 0x80;
    update(&pad, 1);
    unsigned char zero = 0;
    while (fill != 56) update(&zero, 1);
    unsigned char lenb[8];
    for (int i = 0; i < 8; ++i) lenb[i] = static_cast<unsigned char>(bits >> (56 - 8 * i));
    update(lenb, 8);
    char out[41];
    for (int i = 0; i < 5; ++i) std::snprintf(out + 8 * i, 9, "%08x", h[i]);
    return std::string(out, 40);
  }
};

}  // namespace detail

inline std::string git_blob_sha1(const std::string& content) {
  detail::Sha1 s;
  std::string header = "blob " + std::to_string(content.size());
  s.update(header.data(), header.size() + 1);  // includes the trailing NUL
  s.update(content.data(), content.size());
  return s.hex();
}

inline std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot read file: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write file: " + path);
  f << content;
}

// ---------------------------------------------------------------------------
// Curve / domain schemas.
//   curve:  {"dimension":2|3, "modes":M,
//            "coeffs":{"x":{"a0":..,"a":[..],"b":[..]}, "y":{...}, "z":{...}}}
//   domain: {"dimension":2, "outer":<curve>, "holes":[<curve>...]}
//       or  {"dimension":2, "components":[{"outer":..,"holes":[..]},...]}

inline Json series_to_json(const FourierSeries& f) {
  return Json{{"a0", f.a0}, {"a", f.a}, {"b", f.b}};
}

inline FourierSeries series_from_json(const Json& j) {
  FourierSeries f;
  f.a0 = j.at("a0").get<double>();
  f.a = j.at("a").get<std::vector<double>>();
  f.b = j.at("b").get<std::vector<double>>();
  if (f.a.size() != f.b.size())
    throw ConfigError("curve schema: cosine/sine arrays differ in length");
  return f;
}

inline Json curve_to_json(const ClosedCurve& c) {
  Json j;
  j["dimension"] = c.dimension;
  j["modes"] = c.modes();
  Json coeffs;
  coeffs["x"] = series_to_json(c.coord[0]);
  coeffs["y"] = series_to_json(c.coord[1]);
  if (c.dimension == 3) coeffs["z"] = series_to_json(c.coord[2]);
  j["coeffs"] = coeffs;
  return j;
}

inline ClosedCurve curve_from_json(const Json& j) {
  int dim = j.at("dimension").get<int>();
  if (dim != 2 && dim != 3) throw ConfigError("curve schema: dimension must be 2 or 3");
  const Json& coeffs = j.at("coeffs");
  FourierSeries x = series_from_json(coeffs.at("x"));
  FourierSeries y = series_from_json(coeffs.at("y"));
  FourierSeries z = (dim == 3 && coeffs.contains("z")) ? series_from_json(coeffs.at("z"))
                                                       : FourierSeries{};
  return ClosedCurve(dim, std::move(x), std::move(y), std::move(z));
}

inline Json domain_to_json(const PlanarDomain& d) {
  Json j;
  j["dimension"] = 2;
  if (d.components.size() == 1) {
    j["outer"] = curve_to_json(d.components[0].outer);
    Json holes = Json::array();
    for (const auto& h : d.components[0].holes) holes.push_back(curve_to_json(h));
    j["holes"] = holes;
  } else {
    Json comps = Json::array();
    for (const auto& c : d.components) {
      Json jc;
      jc["outer"] = curve_to_json(c.outer);
      Json holes = Json::array();
      for (const auto& h : c.holes) holes.push_back(curve_to_json(h));
      jc["holes"] = holes;
      comps.push_back(jc);
    }
    j["components"] = comps;
  }
  return j;
}

inline PlanarDomain domain_from_json(const Json& j) {
  std::vector<DomainComponent> comps;
  auto read_comp = [](const Json& jc) {
    DomainComponent c;
    c.outer = curve_from_json(jc.at("outer"));
    if (jc.contains("holes"))
      for (const auto& h : jc.at("holes")) c.holes.push_back(curve_from_json(h));
    return c;
  };
  if (j.contains("components")) {
    for (const auto& jc : j.at("components")) comps.push_back(read_comp(jc));
  } else if (j.contains("outer")) {
    comps.push_back(read_comp(j));
  } else {
    throw ConfigError("domain schema: expected 'outer' or 'components'");
  }
  return PlanarDomain(std::move(comps));
}

// Load either a bare curve or a domain file and report which.
struct LoadedInput {
  bool is_domain = false;
  ClosedCurve curve;
  PlanarDomain domain;
  std::string content_hash;
};

inline LoadedInput load_input(const std::string& path) {
  std::string text = read_file(path);
  Json j = Json::parse(text);
  LoadedInput in;
  in.content_hash = git_blob_sha1(text);
  if (j.contains("outer") || j.contains("components")) {
    in.is_domain = true;
    in.domain = domain_from_json(j);
  } else {
    in.curve = curve_from_json(j);
  }
  return in;
}

// ---------------------------------------------------------------------------
// Result serialization.

inline Json renorm_to_json(const RenormResult& r) {
  Json j;
  j["value"] = r.value;
  j["fit_residual"] = r.fit_residual;
  j["error_estimate"] = r.error_estimate;
  j["condition"] = r.condition;
  Json ladder = Json::array();
  for (auto [e, v] : r.ladder) ladder.push_back(Json{{"eps", e}, {"value", v}});
  j["ladder"] = ladder;
  Json coeffs = Json::object();
  for (auto [e, v] : r.coefficients) coeffs[std::to_string(e)] = v;
  j["coefficients"] = coeffs;
  return j;
}

inline Json mc_to_json(const MCEstimate& m) {
  Json j;
  j["mean"] = m.mean;
  j["std_error"] = m.std_error;
  j["n_samples"] = m.n_samples;
  j["r_min"] = m.r_min;
  j["r_max"] = m.r_max;
  j["tail_bound"] = m.tail_bound;
  j["discard_rate"] = m.discard_rate;
  return j;
}

// Fixed-column CSV route table: route,value,err,n,runtime_ms.
struct RouteRow {
  std::string route;
  double value = 0;
  double err = 0;
  std::int64_t n = 0;
  double runtime_ms = 0;
};

inline std::string routes_to_csv(const std::vector<RouteRow>& rows) {
  std::ostringstream ss;
  ss << "route,value,err,n,runtime_ms\n";
  char buf[512];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%s,%.17g,%.17g,%lld,%.3f\n", r.route.c_str(),
                  r.value, r.err, static_cast<long long>(r.n), r.runtime_ms);
    ss << buf;
  }
  return ss.str();
}

}  // namespace mobius::io

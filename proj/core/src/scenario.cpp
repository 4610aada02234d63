#include "wbe/scenario.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <json.hpp>

namespace wbe {

using nlohmann::json;

ScenarioError::ScenarioError(std::string field, const std::string& message)
    : std::runtime_error("scenario field '" + field + "': " + message), field_(std::move(field)) {}

std::string to_string(Mode m) {
  switch (m) {
    case Mode::HedacNonStationary: return "hedac-nonstationary";
    case Mode::HedacStationary: return "hedac-stationary";
    case Mode::Smc: return "smc";
    case Mode::Passive: return "passive";
    case Mode::SearchPattern: return "search-pattern";
  }
  return "unknown";
}

Mode parse_mode(const std::string& s) {
  for (Mode m : {Mode::HedacNonStationary, Mode::HedacStationary, Mode::Smc, Mode::Passive,
                 Mode::SearchPattern})
    if (to_string(m) == s) return m;
  throw ScenarioError("mode", "unknown mode '" + s + "'");
}

std::vector<std::uint64_t> ScenarioSpec::seeds() const {
  std::vector<std::uint64_t> out;
  for (int k = 0; k < seedCount; ++k) out.push_back(firstSeed + static_cast<std::uint64_t>(k));
  return out;
}

std::string ScenarioSpec::resolve(const std::string& path) const {
  if (path.empty()) return path;
  const std::filesystem::path p(path);
  if (p.is_absolute()) return path;
  return (std::filesystem::path(baseDir) / p).lexically_normal().string();
}

std::string default_scenario_json() {
  return R"({
  "name": "scenario",
  "mode": "hedac-nonstationary",
  "horizon": 1000,
  "seeds": {"first": 0, "count": 1},
  "domain": {"shape": [75, 75], "spacing": [1, 1], "origin": [0, 0]},
  "target": {"uniform": true},
  "chain": {"planar": {"links": 5, "length": 1.0, "base": [37, 37], "limit": 3.141592653589793}},
  "agents": [{"link": -1, "method": "equispaced", "spacing": 1.0, "active": true}],
  "controller": {"dt": 1.0, "maxJointSpeed": 1.0, "damping": 1e-6, "twistGain": 1.0, "alpha": 1.0, "nSteps": 1,
                 "stationaryTol": 1e-8, "maxStationaryIters": 100000},
  "coverage": {"footprintRadius": 1.0, "outOfBounds": "clamp"},
  "initial": {"requireTipInDomain": true, "maxAttempts": 100000},
  "smc": {"basis": 20, "uMax": 1.0, "damping": 1e-4},
  "contact": {"enabled": false, "radius": 0.033},
  "pattern": {"laneSpacing": 0.08, "layerSpacing": 0.2, "pathSpeed": 0.01, "tolerance": 0.01,
              "patience": 200, "damping": 1e-4, "orientationGain": 1.0, "reverse": false},
  "output": {"snapshotInterval": 0}
})";
}

namespace {

// Typed access with the dotted field path in every error.
struct Reader {
  const json& j;
  std::string path;

  Reader at(const std::string& key) const {
    if (!j.is_object() || !j.contains(key)) throw ScenarioError(join(key), "missing");
    return Reader{j.at(key), join(key)};
  }
  bool has(const std::string& key) const { return j.is_object() && j.contains(key); }
  std::string join(const std::string& key) const { return path.empty() ? key : path + "." + key; }

  double num() const {
    if (!j.is_number()) throw ScenarioError(path, "expected a number");
    return j.get<double>();
  }
  long integer() const {
    if (!j.is_number_integer()) throw ScenarioError(path, "expected an integer");
    return j.get<long>();
  }
  bool boolean() const {
    if (!j.is_boolean()) throw ScenarioError(path, "expected true or false");
    return j.get<bool>();
  }
  std::string str() const {
    if (!j.is_string()) throw ScenarioError(path, "expected a string");
    return j.get<std::string>();
  }
  std::vector<double> nums() const {
    if (!j.is_array()) throw ScenarioError(path, "expected an array of numbers");
    std::vector<double> v;
    for (std::size_t n = 0; n < j.size(); ++n) v.push_back(Reader{j[n], path + "[" + std::to_string(n) + "]"}.num());
    return v;
  }
  Point point(int dims) const {
    const std::vector<double> v = nums();
    if (static_cast<int>(v.size()) != dims)
      throw ScenarioError(path, "expected " + std::to_string(dims) + " coordinates");
    Point p = Point::Zero();
    for (int i = 0; i < dims; ++i) p[i] = v[static_cast<std::size_t>(i)];
    return p;
  }
  std::vector<Reader> items() const {
    if (!j.is_array()) throw ScenarioError(path, "expected an array");
    std::vector<Reader> out;
    for (std::size_t n = 0; n < j.size(); ++n) out.push_back(Reader{j[n], path + "[" + std::to_string(n) + "]"});
    return out;
  }
};

void read_domain(const Reader& r, DomainSpec& d) {
  const std::vector<double> shape = r.at("shape").nums();
  if (shape.size() != 2 && shape.size() != 3) throw ScenarioError(r.join("shape"), "need 2 or 3 entries");
  d.dims = static_cast<int>(shape.size());
  const std::vector<double> spacing = r.at("spacing").nums();
  const std::vector<double> origin = r.at("origin").nums();
  if (spacing.size() != shape.size()) throw ScenarioError(r.join("spacing"), "length differs from shape");
  if (origin.size() != shape.size()) throw ScenarioError(r.join("origin"), "length differs from shape");
  d.shape = {1, 1, 1};
  d.spacing = {1.0, 1.0, 1.0};
  d.origin = {0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (shape[i] != std::floor(shape[i])) throw ScenarioError(r.join("shape"), "cell counts must be integers");
    d.shape[i] = static_cast<Index>(shape[i]);
    d.spacing[i] = spacing[i];
    d.origin[i] = origin[i];
  }
}

void read_target(const Reader& r, int dims, TargetSpec& t) {
  t = TargetSpec{};
  if (r.has("image")) {
    t.image = r.at("image").str();
    return;
  }
  if (!r.has("primitives")) return;
  for (const Reader& p : r.at("primitives").items()) {
    TargetPrimitive prim;
    const std::string type = p.at("type").str();
    if (type == "box") {
      prim.kind = TargetPrimitive::Kind::Box;
      prim.lower = p.at("lower").point(dims);
      prim.upper = p.at("upper").point(dims);
    } else if (type == "gaussian") {
      prim.kind = TargetPrimitive::Kind::Gaussian;
      prim.mean = p.at("mean").point(dims);
      prim.sigma = Point::Ones();
      const Point s = p.at("sigma").point(dims);
      for (int i = 0; i < dims; ++i) prim.sigma[i] = s[i];
    } else {
      throw ScenarioError(p.join("type"), "expected 'box' or 'gaussian'");
    }
    if (p.has("weight")) prim.weight = p.at("weight").num();
    t.primitives.push_back(prim);
  }
}

void read_chain(const Reader& r, ChainSpec& c) {
  c = ChainSpec{};
  if (r.has("model")) {
    c.model = r.at("model").str();
    return;
  }
  const Reader p = r.at("planar");
  c.planarLinks = static_cast<int>(p.at("links").integer());
  c.planarLength = p.at("length").num();
  c.planarBase = p.at("base").point(2);
  c.planarLimit = p.at("limit").num();
}

AgentSpec read_agent(const Reader& r, int dims) {
  AgentSpec a;
  a.link = static_cast<int>(r.at("link").integer());
  const std::string method = r.at("method").str();
  if (method == "equispaced") {
    a.method = AgentSpec::Method::Equispaced;
    if (r.has("spacing")) a.spacing = r.at("spacing").num();
  } else if (method == "poisson") {
    a.method = AgentSpec::Method::Poisson;
    if (r.has("radius")) a.radius = r.at("radius").num();
    if (r.has("seed")) a.seed = static_cast<std::uint64_t>(r.at("seed").integer());
  } else if (method == "points") {
    a.method = AgentSpec::Method::Points;
    for (const Reader& p : r.at("points").items()) a.points.push_back(p.point(dims == 2 ? 2 : 3));
  } else {
    throw ScenarioError(r.join("method"), "expected 'equispaced', 'poisson' or 'points'");
  }
  if (r.has("active")) a.active = r.at("active").boolean();
  return a;
}

ScenarioSpec from_json(const json& doc, const std::string& baseDir) {
  const Reader root{doc, ""};
  ScenarioSpec s;
  s.baseDir = baseDir;
  s.name = root.at("name").str();
  s.mode = parse_mode(root.at("mode").str());
  s.horizon = root.at("horizon").integer();
  {
    const Reader seeds = root.at("seeds");
    const long first = seeds.at("first").integer();
    if (first < 0) throw ScenarioError("seeds.first", "must be >= 0");
    s.firstSeed = static_cast<std::uint64_t>(first);
    s.seedCount = static_cast<int>(seeds.at("count").integer());
  }
  read_domain(root.at("domain"), s.domain);
  read_target(root.at("target"), s.domain.dims, s.target);
  read_chain(root.at("chain"), s.chain);
  for (const Reader& a : root.at("agents").items()) s.agents.push_back(read_agent(a, s.domain.dims));
  if (root.has("activeLinks")) {
    std::vector<int> links;
    for (double v : root.at("activeLinks").nums()) links.push_back(static_cast<int>(v));
    s.activeLinks = links;
  }

  const Reader c = root.at("controller");
  s.controller.dt = c.at("dt").num();
  s.controller.maxJointSpeed = c.at("maxJointSpeed").num();
  s.controller.damping = c.at("damping").num();
  s.controller.twistGain = c.at("twistGain").num();
  {
    const Reader alpha = c.at("alpha");
    if (alpha.j.is_array()) {
      const std::vector<double> v = alpha.nums();
      if (static_cast<int>(v.size()) != s.domain.dims)
        throw ScenarioError(alpha.path, "need one rate per axis");
      for (std::size_t i = 0; i < v.size(); ++i) s.controller.diffusion.alpha[i] = v[i];
    } else {
      s.controller.diffusion.alpha.fill(alpha.num());
    }
  }
  s.controller.diffusion.nSteps = static_cast<int>(c.at("nSteps").integer());
  s.controller.diffusion.stationaryTol = c.at("stationaryTol").num();
  s.controller.diffusion.maxStationaryIters = c.at("maxStationaryIters").integer();

  const Reader cov = root.at("coverage");
  s.footprintRadius = cov.at("footprintRadius").num();
  {
    const std::string oob = cov.at("outOfBounds").str();
    if (oob == "clamp") s.outOfBounds = OutOfBounds::Clamp;
    else if (oob == "drop") s.outOfBounds = OutOfBounds::Drop;
    else throw ScenarioError("coverage.outOfBounds", "expected 'clamp' or 'drop'");
  }

  const Reader init = root.at("initial");
  s.initial.requireTipInDomain = init.at("requireTipInDomain").boolean();
  s.initial.maxAttempts = static_cast<int>(init.at("maxAttempts").integer());
  if (init.has("configIndex")) s.initial.configIndex = static_cast<int>(init.at("configIndex").integer());
  if (init.has("configs"))
    for (const Reader& q : init.at("configs").items()) s.initial.configs.push_back(q.nums());

  const Reader smc = root.at("smc");
  s.smc.basis = static_cast<int>(smc.at("basis").integer());
  s.smc.uMax = smc.at("uMax").num();
  s.smc.damping = smc.at("damping").num();

  const Reader con = root.at("contact");
  s.contact.enabled = con.at("enabled").boolean();
  s.contact.radius = con.at("radius").num();
  if (con.has("centerLower")) s.contact.centerLower = con.at("centerLower").point(s.domain.dims);
  if (con.has("centerUpper")) s.contact.centerUpper = con.at("centerUpper").point(s.domain.dims);
  if (con.has("links"))
    for (double v : con.at("links").nums()) s.contact.links.push_back(static_cast<int>(v));

  const Reader pat = root.at("pattern");
  s.pattern.laneSpacing = pat.at("laneSpacing").num();
  s.pattern.layerSpacing = pat.at("layerSpacing").num();
  s.pattern.pathSpeed = pat.at("pathSpeed").num();
  s.pattern.tolerance = pat.at("tolerance").num();
  s.pattern.patience = static_cast<int>(pat.at("patience").integer());
  s.pattern.damping = pat.at("damping").num();
  s.pattern.orientationGain = pat.at("orientationGain").num();
  s.pattern.reverse = pat.at("reverse").boolean();

  s.snapshotInterval = root.at("output").at("snapshotInterval").integer();
  s.validate();
  return s;
}

}  // namespace

void ScenarioSpec::validate() const {
  if (horizon < 1) throw ScenarioError("horizon", "must be >= 1");
  if (seedCount < 1) throw ScenarioError("seeds.count", "must be >= 1");
  for (int i = 0; i < domain.dims; ++i) {
    if (domain.shape[static_cast<std::size_t>(i)] < 3) throw ScenarioError("domain.shape", "each axis needs >= 3 cells");
    if (!(domain.spacing[static_cast<std::size_t>(i)] > 0.0)) throw ScenarioError("domain.spacing", "must be > 0");
  }
  if (!target.image.empty() && domain.dims != 2) throw ScenarioError("target.image", "images need a planar domain");
  for (const TargetPrimitive& p : target.primitives) {
    if (!(p.weight >= 0.0)) throw ScenarioError("target.primitives.weight", "must be >= 0");
    if (p.kind == TargetPrimitive::Kind::Gaussian && !(p.sigma.array() > 0.0).all())
      throw ScenarioError("target.primitives.sigma", "must be > 0");
  }
  if (chain.model.empty()) {
    if (domain.dims != 2) throw ScenarioError("chain", "a spatial domain needs a chain model file");
    if (chain.planarLinks < 1) throw ScenarioError("chain.planar.links", "must be >= 1");
    if (!(chain.planarLength > 0.0)) throw ScenarioError("chain.planar.length", "must be > 0");
    if (!(chain.planarLimit > 0.0)) throw ScenarioError("chain.planar.limit", "must be > 0");
  }
  if (agents.empty()) throw ScenarioError("agents", "at least one agent group is required");
  for (const AgentSpec& a : agents) {
    if (a.method == AgentSpec::Method::Equispaced && !(a.spacing > 0.0))
      throw ScenarioError("agents.spacing", "must be > 0");
    if (a.method == AgentSpec::Method::Poisson && !(a.radius > 0.0))
      throw ScenarioError("agents.radius", "must be > 0");
    if (a.method == AgentSpec::Method::Points && a.points.empty())
      throw ScenarioError("agents.points", "must list at least one point");
  }
  if (!(controller.dt > 0.0)) throw ScenarioError("controller.dt", "must be > 0");
  if (!(controller.maxJointSpeed > 0.0)) throw ScenarioError("controller.maxJointSpeed", "must be > 0");
  if (controller.damping < 0.0) throw ScenarioError("controller.damping", "must be >= 0");
  if (!(controller.twistGain > 0.0)) throw ScenarioError("controller.twistGain", "must be > 0");
  for (int i = 0; i < domain.dims; ++i)
    if (!(controller.diffusion.alpha[static_cast<std::size_t>(i)] > 0.0))
      throw ScenarioError("controller.alpha", "must be > 0");
  if (controller.diffusion.nSteps < 1) throw ScenarioError("controller.nSteps", "must be >= 1");
  if (!(controller.diffusion.stationaryTol > 0.0)) throw ScenarioError("controller.stationaryTol", "must be > 0");
  if (controller.diffusion.maxStationaryIters < 1)
    throw ScenarioError("controller.maxStationaryIters", "must be >= 1");
  if (!(footprintRadius > 0.0)) throw ScenarioError("coverage.footprintRadius", "must be > 0");
  if (initial.configIndex >= static_cast<int>(std::max<std::size_t>(initial.configs.size(), 1)) ||
      (initial.configIndex >= 0 && initial.configs.empty()))
    throw ScenarioError("initial.configIndex", "no such entry in initial.configs");
  if (initial.maxAttempts < 1) throw ScenarioError("initial.maxAttempts", "must be >= 1");
  if (mode == Mode::Smc) {
    if (domain.dims != 2) throw ScenarioError("mode", "smc needs a planar domain");
    if (smc.basis < 1) throw ScenarioError("smc.basis", "must be >= 1");
    if (!(smc.uMax > 0.0)) throw ScenarioError("smc.uMax", "must be > 0");
    if (smc.damping < 0.0) throw ScenarioError("smc.damping", "must be >= 0");
  }
  if (contact.enabled && !(contact.radius > 0.0)) throw ScenarioError("contact.radius", "must be > 0");
  if (contact.centerLower.has_value() != contact.centerUpper.has_value())
    throw ScenarioError("contact.centerLower", "give both centerLower and centerUpper");
  if (mode == Mode::SearchPattern) {
    if (domain.dims != 3) throw ScenarioError("mode", "search-pattern needs a spatial domain");
    if (!(pattern.laneSpacing > 0.0)) throw ScenarioError("pattern.laneSpacing", "must be > 0");
    if (!(pattern.layerSpacing > 0.0)) throw ScenarioError("pattern.layerSpacing", "must be > 0");
    if (!(pattern.pathSpeed > 0.0)) throw ScenarioError("pattern.pathSpeed", "must be > 0");
    if (!(pattern.tolerance > 0.0)) throw ScenarioError("pattern.tolerance", "must be > 0");
    if (pattern.patience < 1) throw ScenarioError("pattern.patience", "must be >= 1");
  }
  if (snapshotInterval < 0) throw ScenarioError("output.snapshotInterval", "must be >= 0");
}

ScenarioSpec parse_scenario(const std::string& text, const std::string& baseDir) {
  json doc;
  try {
    doc = json::parse(text, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ScenarioError("<document>", e.what());
  }
  if (!doc.is_object()) throw ScenarioError("<document>", "expected an object");
  json merged = json::parse(default_scenario_json());
  if (doc.contains("defaults")) {
    if (!doc["defaults"].is_object()) throw ScenarioError("defaults", "expected an object");
    merged.merge_patch(doc["defaults"]);
    doc.erase("defaults");
  }
  // Arrays replace rather than merge; the agent list is replaced wholesale.
  merged.merge_patch(doc);
  return from_json(merged, baseDir);
}

ScenarioSpec load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("<file>", "cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  const auto dir = std::filesystem::path(path).parent_path();
  return parse_scenario(buf.str(), dir.empty() ? "." : dir.string());
}

ScenarioAssets build_assets(const ScenarioSpec& spec) {
  spec.validate();
  const GridDomain domain = spec.domain.build();

  TargetDistribution target = [&] {
    try {
      if (!spec.target.image.empty()) return image_target(spec.resolve(spec.target.image), domain);
      if (!spec.target.primitives.empty()) return make_target(domain, spec.target.primitives);
      return uniform_target(domain);
    } catch (const ScenarioError&) {
      throw;
    } catch (const std::exception& e) {
      throw ScenarioError("target", e.what());
    }
  }();

  KinematicChain chain = [&] {
    try {
      if (!spec.chain.model.empty()) return load_chain_model(spec.resolve(spec.chain.model));
      return planar_chain(spec.chain.planarLinks, spec.chain.planarLength, spec.chain.planarBase,
                          spec.chain.planarLimit);
    } catch (const std::exception& e) {
      throw ScenarioError("chain", e.what());
    }
  }();
  if (chain.dims() != domain.dims()) throw ScenarioError("chain", "chain and domain dimensions differ");

  std::vector<VirtualAgent> agents;
  for (const AgentSpec& a : spec.agents) {
    const int link = a.link < 0 ? chain.size() + a.link : a.link;
    if (link < 0 || link >= chain.size()) throw ScenarioError("agents.link", "no link " + std::to_string(a.link));
    bool active = a.active;
    if (spec.activeLinks)
      active = std::find(spec.activeLinks->begin(), spec.activeLinks->end(), link) != spec.activeLinks->end();
    std::vector<VirtualAgent> group;
    switch (a.method) {
      case AgentSpec::Method::Equispaced:
        group = sample_agents_equispaced(chain, link, a.spacing, active);
        break;
      case AgentSpec::Method::Poisson:
        group = sample_agents_poisson(chain, link, a.radius, a.seed, active);
        break;
      case AgentSpec::Method::Points:
        for (const Point& p : a.points) group.push_back({link, p, active});
        break;
    }
    agents.insert(agents.end(), group.begin(), group.end());
  }

  if (spec.mode == Mode::Passive || spec.mode == Mode::Smc || spec.mode == Mode::SearchPattern) {
    // Single controlled point at the tip of the last link; the rest only cover.
    const int last = chain.size() - 1;
    const Point tip = chain.link(last).p1;
    std::size_t best = agents.size();
    double bestDist = std::numeric_limits<double>::infinity();
    for (std::size_t n = 0; n < agents.size(); ++n) {
      agents[n].active = false;
      if (agents[n].link != last) continue;
      const double d = (agents[n].local - tip).norm();
      if (d < bestDist) {
        bestDist = d;
        best = n;
      }
    }
    if (spec.mode == Mode::Passive) {
      if (best == agents.size()) throw ScenarioError("agents", "passive mode needs an agent on the last link");
      agents[best].active = true;
    }
  }
  AgentLayout layout(std::move(agents));
  if (layout.size() == 0) throw ScenarioError("agents", "the layout is empty");
  const bool controlled = spec.mode == Mode::HedacNonStationary || spec.mode == Mode::HedacStationary;
  if (controlled && layout.active_links().empty())
    throw ScenarioError("activeLinks", "no link carries an active agent");
  return ScenarioAssets{domain, std::move(target), std::move(chain), std::move(layout)};
}

}  // namespace wbe

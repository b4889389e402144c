#include "cornerlog/serialization.hpp"

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace cornerlog {

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
    throw SchemaError((where.empty() ? std::string("/") : where) + ": " + what);
}

void only_keys(const Json& j, const std::string& where, std::initializer_list<const char*> keys) {
    if (!j.is_object()) fail(where, "expected an object");
    const std::set<std::string> ok(keys.begin(), keys.end());
    for (const auto& [k, v] : j.items()) {
        if (!ok.count(k)) fail(where + "/" + k, "unknown field");
    }
}

double number(const Json& j, const std::string& where) {
    if (!j.is_number()) fail(where, "expected a number");
    return j.get<double>();
}

std::string string_field(const Json& j, const std::string& where) {
    if (!j.is_string()) fail(where, "expected a string");
    return j.get<std::string>();
}

CoordFamily family_from_json(const Json& j, const std::string& where) {
    only_keys(j, where, {"lambda", "a1", "a2", "radius"});
    CoordFamily f;
    if (j.contains("lambda")) f.lambda = complex_from_json(j["lambda"], where + "/lambda");
    if (j.contains("a1")) f.a1 = complex_from_json(j["a1"], where + "/a1");
    if (j.contains("a2")) f.a2 = complex_from_json(j["a2"], where + "/a2");
    if (j.contains("radius")) f.radius = number(j["radius"], where + "/radius");
    return f;
}

Json to_json(const CoordFamily& f) {
    Json j;
    j["lambda"] = cornerlog::to_json(f.lambda);
    j["a1"] = cornerlog::to_json(f.a1);
    j["a2"] = cornerlog::to_json(f.a2);
    if (f.radius != 0.0) j["radius"] = f.radius;
    return j;
}

int component_ref(const Json& j, const std::vector<Component>& comps, const std::string& where) {
    if (j.is_number_integer()) {
        const int k = j.get<int>();
        if (k < 0 || k >= static_cast<int>(comps.size())) fail(where, "component index out of range");
        return k;
    }
    const std::string name = string_field(j, where);
    for (std::size_t k = 0; k < comps.size(); ++k) {
        if (comps[k].name == name) return static_cast<int>(k);
    }
    fail(where, "unknown component '" + name + "'");
}

bool is_file(const std::string& s) {
    std::ifstream in(s);
    return in.good();
}

}  // namespace

Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError(path + ": cannot open file");
    std::stringstream ss;
    ss << in.rdbuf();
    const std::string text = ss.str();
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        std::size_t line = 1, col = 1;
        for (std::size_t k = 0; k + 1 < e.byte && k < text.size(); ++k) {
            if (text[k] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw SchemaError(path + ": JSON syntax error at line " + std::to_string(line) + ", column " + std::to_string(col));
    }
}

cplx<double> complex_from_json(const Json& j, const std::string& where) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
        return {j[0].get<double>(), j[1].get<double>()};
    }
    fail(where, "expected a number or [re, im]");
}

Json to_json(const cplx<double>& z) { return Json::array({z.real(), z.imag()}); }

cplx<double> parse_complex(const std::string& s0) {
    std::string s;
    for (char ch : s0) {
        if (ch != ' ') s += ch;
    }
    auto bad = [&]() -> cplx<double> { throw DomainError("cannot parse complex number '" + s0 + "'"); };
    if (s.empty()) return bad();
    if (s.front() == '(' && s.back() == ')') {
        const auto comma = s.find(',');
        if (comma == std::string::npos) return bad();
        char* e1 = nullptr;
        char* e2 = nullptr;
        const std::string a = s.substr(1, comma - 1), b = s.substr(comma + 1, s.size() - comma - 2);
        const double re = std::strtod(a.c_str(), &e1), im = std::strtod(b.c_str(), &e2);
        if (a.empty() || b.empty() || *e1 || *e2) return bad();
        return {re, im};
    }
    const char* p = s.c_str();
    char* end = nullptr;
    const double first = std::strtod(p, &end);
    if (end == p) {
        // "i", "-i"
        if (s == "i" || s == "+i") return {0.0, 1.0};
        if (s == "-i") return {0.0, -1.0};
        return bad();
    }
    if (*end == '\0') return {first, 0.0};
    if (*end == 'i' && end[1] == '\0') return {0.0, first};
    const char* q = end;
    if (*q != '+' && *q != '-') return bad();
    char* end2 = nullptr;
    double second = std::strtod(q, &end2);
    if (end2 == q + 1 && *end2 == 'i') second = *q == '-' ? -1.0 : 1.0;  // "x+i"
    else if (end2 == q) return bad();
    if (*end2 != 'i' || end2[1] != '\0') return bad();
    return {first, second};
}

ChartCenter center_from_json(const Json& j) {
    only_keys(j, "", {"name", "builtin", "cutoff", "components", "marked", "nodes"});
    ChartCenter c;
    if (j.contains("builtin")) {
        if (j.contains("components") || j.contains("marked") || j.contains("nodes")) {
            fail("/builtin", "a built-in center cannot also list components, marked points or nodes");
        }
        try {
            c = builtin_center(string_field(j["builtin"], "/builtin"));
        } catch (const SchemaError&) {
            throw;
        } catch (const DomainError& e) {
            fail("/builtin", e.what());
        }
    } else {
        if (!j.contains("components") || !j["components"].is_array() || j["components"].empty()) {
            fail("/components", "expected a non-empty array");
        }
        auto& t = c.tree;
        for (std::size_t k = 0; k < j["components"].size(); ++k) {
            const std::string w = "/components/" + std::to_string(k);
            const auto& e = j["components"][k];
            only_keys(e, w, {"name", "kind"});
            Component comp;
            comp.name = e.contains("name") ? string_field(e["name"], w + "/name") : std::to_string(k);
            const std::string kind = e.contains("kind") ? string_field(e["kind"], w + "/kind") : "";
            if (kind == "disk") comp.kind = ComponentKind::disk;
            else if (kind == "sphere") comp.kind = ComponentKind::sphere;
            else fail(w + "/kind", "expected \"disk\" or \"sphere\"");
            t.components.push_back(comp);
        }
        if (j.contains("marked")) {
            if (!j["marked"].is_array()) fail("/marked", "expected an array");
            for (std::size_t k = 0; k < j["marked"].size(); ++k) {
                const std::string w = "/marked/" + std::to_string(k);
                const auto& e = j["marked"][k];
                only_keys(e, w, {"label", "component", "position", "free"});
                MarkedPoint m;
                const std::string label = e.contains("label") ? string_field(e["label"], w + "/label") : "";
                if (label.size() < 2 || (label[0] != 'b' && label[0] != 'i') ||
                    label.find_first_not_of("0123456789", 1) != std::string::npos) {
                    fail(w + "/label", "expected b<k> (boundary) or i<k> (interior)");
                }
                m.boundary = label[0] == 'b';
                m.index = std::stoi(label.substr(1));
                if (!e.contains("component")) fail(w + "/component", "missing");
                m.component = component_ref(e["component"], t.components, w + "/component");
                if (!e.contains("position")) fail(w + "/position", "missing");
                m.position = complex_from_json(e["position"], w + "/position");
                const std::string fr = e.contains("free") ? string_field(e["free"], w + "/free") : "none";
                if (fr == "re") m.free_re = true;
                else if (fr == "im") m.free_im = true;
                else if (fr == "both") m.free_re = m.free_im = true;
                else if (fr != "none") fail(w + "/free", "expected none, re, im or both");
                t.marked.push_back(m);
            }
        }
        if (j.contains("nodes")) {
            if (!j["nodes"].is_array()) fail("/nodes", "expected an array");
            for (std::size_t k = 0; k < j["nodes"].size(); ++k) {
                const std::string w = "/nodes/" + std::to_string(k);
                const auto& e = j["nodes"][k];
                only_keys(e, w,
                          {"kind", "parent", "child", "parent_position", "child_position", "parent_family", "child_family"});
                Node nd;
                const std::string kind = e.contains("kind") ? string_field(e["kind"], w + "/kind") : "";
                if (kind == "boundary") nd.kind = NodeKind::boundary;
                else if (kind == "interior") nd.kind = NodeKind::interior;
                else fail(w + "/kind", "expected \"boundary\" or \"interior\"");
                for (const char* f : {"parent", "child", "parent_position", "child_position"}) {
                    if (!e.contains(f)) fail(w + "/" + f, "missing");
                }
                nd.parent = component_ref(e["parent"], t.components, w + "/parent");
                nd.child = component_ref(e["child"], t.components, w + "/child");
                nd.parent_position = complex_from_json(e["parent_position"], w + "/parent_position");
                nd.child_position = complex_from_json(e["child_position"], w + "/child_position");
                if (e.contains("parent_family")) nd.parent_family = family_from_json(e["parent_family"], w + "/parent_family");
                if (e.contains("child_family")) nd.child_family = family_from_json(e["child_family"], w + "/child_family");
                t.nodes.push_back(nd);
            }
        }
    }
    if (j.contains("name")) c.name = string_field(j["name"], "/name");
    if (j.contains("cutoff")) c.cutoff = number(j["cutoff"], "/cutoff");
    const auto problems = validate(c.tree);
    if (!problems.empty()) {
        std::string msg = "invalid tree:";
        for (const auto& p : problems) msg += " " + p + ";";
        fail("", msg);
    }
    try {
        c.validate();
    } catch (const DomainError& e) {
        fail("", e.what());
    }
    return c;
}

Json to_json(const ChartCenter& c) {
    Json j;
    j["name"] = c.name;
    j["cutoff"] = c.cutoff;
    Json comps = Json::array();
    for (const auto& k : c.tree.components) comps.push_back({{"name", k.name}, {"kind", to_string(k.kind)}});
    j["components"] = comps;
    Json marked = Json::array();
    for (const auto& m : c.tree.marked) {
        Json e;
        e["label"] = (m.boundary ? "b" : "i") + std::to_string(m.index);
        e["component"] = c.tree.components[m.component].name;
        e["position"] = to_json(m.position);
        if (m.free_re || m.free_im) e["free"] = m.free_re && m.free_im ? "both" : (m.free_re ? "re" : "im");
        marked.push_back(e);
    }
    j["marked"] = marked;
    Json nodes = Json::array();
    for (const auto& nd : c.tree.nodes) {
        Json e;
        e["kind"] = to_string(nd.kind);
        e["parent"] = c.tree.components[nd.parent].name;
        e["child"] = c.tree.components[nd.child].name;
        e["parent_position"] = to_json(nd.parent_position);
        e["child_position"] = to_json(nd.child_position);
        e["parent_family"] = to_json(nd.parent_family);
        e["child_family"] = to_json(nd.child_family);
        nodes.push_back(e);
    }
    j["nodes"] = nodes;
    return j;
}

ChartCenter load_center(const std::string& s) {
    if (!is_file(s)) {
        try {
            return builtin_center(s);
        } catch (const DomainError&) {
            throw SchemaError(s + ": neither a readable file nor a built-in center");
        }
    }
    try {
        return center_from_json(read_json_file(s));
    } catch (const SchemaError& e) {
        const std::string m = e.what();
        if (m.rfind(s + ":", 0) == 0) throw;
        throw SchemaError(s + ": " + m);
    }
}

ChartPair pair_from_json(const Json& j) {
    only_keys(j, "", {"name", "builtin", "p", "q"});
    ChartPair pr;
    if (j.contains("builtin")) {
        if (j.contains("p") || j.contains("q")) fail("/builtin", "a built-in pair cannot also give p or q");
        try {
            pr = builtin_pair(string_field(j["builtin"], "/builtin"));
        } catch (const DomainError& e) {
            fail("/builtin", e.what());
        }
    } else {
        if (!j.contains("p")) fail("/p", "missing");
        if (!j.contains("q")) fail("/q", "missing");
        auto sub = [&](const char* key) {
            try {
                return center_from_json(j[key]);
            } catch (const SchemaError& e) {
                throw SchemaError(std::string("/") + key + e.what());
            }
        };
        pr.p = sub("p");
        const auto& q = j["q"];
        if (q.is_object() && q.contains("from_p")) {
            only_keys(q, "/q", {"from_p", "name", "families"});
            pr.q = pr.p;
            if (q.contains("name")) pr.q.name = string_field(q["name"], "/q/name");
            if (q.contains("families")) {
                if (!q["families"].is_array()) fail("/q/families", "expected an array");
                for (std::size_t k = 0; k < q["families"].size(); ++k) {
                    const std::string w = "/q/families/" + std::to_string(k);
                    const auto& e = q["families"][k];
                    only_keys(e, w, {"node", "parent_family", "child_family"});
                    if (!e.contains("node") || !e["node"].is_number_integer()) fail(w + "/node", "expected a node index");
                    const int n = e["node"].get<int>();
                    if (n < 0 || n >= static_cast<int>(pr.q.tree.nodes.size())) fail(w + "/node", "node index out of range");
                    auto& nd = pr.q.tree.nodes[n];
                    if (e.contains("parent_family")) nd.parent_family = family_from_json(e["parent_family"], w + "/parent_family");
                    if (e.contains("child_family")) nd.child_family = family_from_json(e["child_family"], w + "/child_family");
                }
            }
            try {
                pr.q.validate();
            } catch (const DomainError& e) {
                fail("/q", e.what());
            }
        } else {
            pr.q = sub("q");
        }
        pr.name = pr.p.name + " vs " + pr.q.name;
    }
    if (j.contains("name")) pr.name = string_field(j["name"], "/name");
    return pr;
}

ChartPair load_pair(const std::string& s) {
    if (!is_file(s)) {
        try {
            return builtin_pair(s);
        } catch (const DomainError&) {
            throw SchemaError(s + ": neither a readable file nor a built-in pair");
        }
    }
    try {
        return pair_from_json(read_json_file(s));
    } catch (const SchemaError& e) {
        const std::string m = e.what();
        if (m.rfind(s + ":", 0) == 0) throw;
        throw SchemaError(s + ": " + m);
    }
}

Json to_json(const ModuliCoords<double>& m) {
    Json j;
    j["type"] = m.type;
    Json pieces = Json::array();
    for (const auto& p : m.pieces) {
        Json e;
        e["label"] = p.label;
        e["kind"] = to_string(p.kind);
        Json coords = Json::object();
        for (std::size_t k = 0; k < p.names.size(); ++k) coords[p.names[k]] = p.values[k];
        e["coordinates"] = coords;
        pieces.push_back(e);
    }
    j["pieces"] = pieces;
    j["flat"] = m.flatten();
    return j;
}

Json to_json(const Configuration<double>& c) {
    Json j;
    j["type"] = c.type();
    j["nodal"] = c.nodal;
    Json pieces = Json::array();
    for (const auto& p : c.pieces) {
        Json pts = Json::array();
        for (const auto& sp : p.points) pts.push_back({{"label", sp.label}, {"position", to_json(sp.position)}});
        pieces.push_back({{"kind", to_string(p.kind)}, {"components", p.components}, {"points", pts}});
    }
    j["pieces"] = pieces;
    return j;
}

Json to_json(const SmoothnessReport& r) {
    Json j;
    j["label"] = r.label();
    j["verdict"] = r.verdict == Verdict::finitely_smooth ? "finitely-smooth" : "consistent-with-smooth";
    j["max_verified_order"] = r.max_verified_order;
    j["checked_order"] = r.checked_order;
    if (!r.failure.empty()) j["failure"] = r.failure;
    Json jumps = Json::object();
    for (int n = 1; n <= r.checked_order; ++n) jumps[std::to_string(n)] = r.jump_at(n);
    j["max_jump_by_order"] = jumps;
    j["directions"] = r.directions;
    return j;
}

Json to_json(const DecayFit& f) {
    Json j;
    j["id"] = f.id;
    j["n"] = f.n;
    j["abscissa"] = f.abscissa;
    j["slope"] = f.slope;
    j["intercept"] = f.intercept;
    j["r2"] = f.r2;
    j["verdict"] = f.passed() ? to_string(f.verdict) : "fail";
    j["halving_slope"] = f.halving_slope;
    j["stable"] = f.stable;
    if (!f.note.empty()) j["note"] = f.note;
    return j;
}

Json to_json(const AngularOffset& a) {
    Json j;
    j["value"] = a.value;
    j["converged"] = a.converged;
    j["T"] = a.T;
    j["raw"] = a.raw;
    j["extrapolated"] = a.extrapolated;
    return j;
}

}  // namespace cornerlog

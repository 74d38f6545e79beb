#include "parcelca/error.hpp"
#include "parcelca/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace parcelca::io {

using nlohmann::json;

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write file: " + path);
    out << content;
    if (!out) throw IoError("write failed: " + path);
}

std::string fnv1a64_hex(const std::string& bytes) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001B3ull;
    }
    char buf[17];
    static const char* hex = "0123456789abcdef";
    for (int i = 15; i >= 0; --i) {
        buf[i] = hex[h & 0xF];
        h >>= 4;
    }
    buf[16] = '\0';
    return std::string(buf, 16);
}

namespace {

geom::Ring parse_ring(const json& coords, std::size_t feature_idx) {
    geom::Ring ring;
    for (const json& pt : coords) {
        if (!pt.is_array() || pt.size() < 2)
            throw IoError("feature " + std::to_string(feature_idx) +
                          ": coordinate is not an [x, y] pair");
        ring.push_back({pt[0].get<double>(), pt[1].get<double>()});
    }
    if (ring.size() < 4 || !(ring.front() == ring.back()))
        throw IoError("feature " + std::to_string(feature_idx) +
                      ": ring must close on its first coordinate with at least 4 points");
    return ring;
}

geom::Polygon parse_polygon(const json& coords, std::size_t feature_idx) {
    if (!coords.is_array() || coords.empty())
        throw IoError("feature " + std::to_string(feature_idx) + ": empty polygon coordinates");
    geom::Polygon poly;
    poly.exterior = parse_ring(coords[0], feature_idx);
    for (std::size_t h = 1; h < coords.size(); ++h)
        poly.holes.push_back(parse_ring(coords[h], feature_idx));
    poly.normalize();
    try {
        poly.validate();
    } catch (const InvalidGeometryError& e) {
        throw IoError("feature " + std::to_string(feature_idx) + ": " + e.what());
    }
    return poly;
}

std::string id_to_string(const json& id, std::size_t feature_idx, bool& numeric) {
    if (id.is_string()) {
        numeric = false;
        return id.get<std::string>();
    }
    if (id.is_number_integer()) {
        numeric = true;
        return std::to_string(id.get<long long>());
    }
    throw IoError("feature " + std::to_string(feature_idx) + ": id must be a string or integer");
}

} // namespace

Landscape parse_parcels(const std::string& text, const CategoryTable* categories) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw IoError(std::string("parcels: invalid JSON: ") + e.what());
    }
    if (!doc.is_object() || doc.value("type", "") != "FeatureCollection" ||
        !doc.contains("features") || !doc["features"].is_array())
        throw IoError("parcels: expected a FeatureCollection with a features array");

    struct RawFeature {
        std::string id;
        bool id_numeric = false;
        geom::Polygon poly;
        json luclass;
        std::optional<std::string> parent;
    };
    std::vector<RawFeature> raws;
    bool any_named = false;

    const json& features = doc["features"];
    for (std::size_t fi = 0; fi < features.size(); ++fi) {
        const json& f = features[fi];
        if (f.value("type", "") != "Feature")
            throw IoError("feature " + std::to_string(fi) + ": not a Feature");
        if (!f.contains("geometry") || !f["geometry"].is_object())
            throw IoError("feature " + std::to_string(fi) + ": missing geometry");
        if (!f.contains("properties") || !f["properties"].is_object())
            throw IoError("feature " + std::to_string(fi) + ": missing properties");
        const json& props = f["properties"];

        json id;
        if (props.contains("id")) {
            id = props["id"];
        } else if (f.contains("id")) {
            id = f["id"];
        } else {
            throw IoError("feature " + std::to_string(fi) + ": missing id property");
        }
        if (!props.contains("luclass"))
            throw IoError("feature " + std::to_string(fi) + ": missing luclass property");
        const json& luclass = props["luclass"];
        if (luclass.is_string()) any_named = true;

        std::optional<std::string> parent;
        if (props.contains("parent_id") && !props["parent_id"].is_null())
            parent = props["parent_id"].is_string()
                         ? props["parent_id"].get<std::string>()
                         : std::to_string(props["parent_id"].get<long long>());

        const json& geometry = f["geometry"];
        const std::string gtype = geometry.value("type", "");
        bool numeric = false;
        const std::string base_id = id_to_string(id, fi, numeric);
        if (gtype == "Polygon") {
            raws.push_back(
                {base_id, numeric, parse_polygon(geometry["coordinates"], fi), luclass, parent});
        } else if (gtype == "MultiPolygon") {
            const json& parts = geometry["coordinates"];
            for (std::size_t part = 0; part < parts.size(); ++part) {
                raws.push_back({base_id + "#" + std::to_string(part), false,
                                parse_polygon(parts[part], fi), luclass, parent});
            }
        } else {
            throw IoError("feature " + std::to_string(fi) + ": geometry type '" + gtype +
                          "' is not Polygon or MultiPolygon");
        }
    }

    // Resolve the category table.
    CategoryTable table;
    bool names_in_file = any_named;
    if (categories) {
        table = *categories;
    } else if (any_named) {
        std::set<std::string> names;
        for (const auto& r : raws) {
            if (!r.luclass.is_string())
                throw IoError("parcels: luclass mixes names and numbers; declare a category table");
            names.insert(r.luclass.get<std::string>());
        }
        table = CategoryTable(std::vector<std::string>(names.begin(), names.end()));
    } else {
        long long max_id = -1;
        for (const auto& r : raws) {
            if (!r.luclass.is_number_integer())
                throw IoError("parcels: luclass must be a category name or integer id");
            max_id = std::max(max_id, r.luclass.get<long long>());
        }
        if (max_id < 0) throw IoError("parcels: no luclass values found");
        std::vector<std::string> names;
        for (long long i = 0; i <= max_id; ++i) names.push_back("class_" + std::to_string(i));
        table = CategoryTable(std::move(names));
    }

    std::vector<Parcel> parcels;
    parcels.reserve(raws.size());
    for (std::size_t i = 0; i < raws.size(); ++i) {
        auto& r = raws[i];
        int cat = -1;
        if (r.luclass.is_string()) {
            cat = table.id_of(r.luclass.get<std::string>());
            if (cat < 0)
                throw IoError("feature " + std::to_string(i) + ": unknown category '" +
                              r.luclass.get<std::string>() + "'");
        } else if (r.luclass.is_number_integer()) {
            const long long v = r.luclass.get<long long>();
            if (v < 0 || v >= table.size())
                throw IoError("feature " + std::to_string(i) + ": category id " +
                              std::to_string(v) + " outside the declared table");
            cat = static_cast<int>(v);
        } else {
            throw IoError("feature " + std::to_string(i) + ": luclass must be a name or id");
        }
        Parcel parcel = Parcel::make(r.id, std::move(r.poly), cat, r.parent);
        parcel.id_numeric = r.id_numeric;
        parcels.push_back(std::move(parcel));
    }

    Landscape ls;
    try {
        ls = make_landscape(std::move(parcels), std::move(table));
    } catch (const ValueError& e) {
        throw IoError(std::string("parcels: ") + e.what());
    }
    ls.names_in_file = names_in_file;
    return ls;
}

Landscape read_parcels(const std::string& path, const CategoryTable* categories) {
    try {
        return parse_parcels(read_text_file(path), categories);
    } catch (const IoError& e) {
        throw IoError(path + ": " + e.what());
    }
}

namespace {

json ring_to_json(const geom::Ring& ring) {
    json arr = json::array();
    for (const auto& pt : ring) arr.push_back(json::array({pt.x, pt.y}));
    return arr;
}

} // namespace

std::string serialize_parcels(const Landscape& ls) {
    json features = json::array();
    for (const Parcel& p : ls.parcels) {
        json coords = json::array();
        coords.push_back(ring_to_json(p.geometry.exterior));
        for (const auto& h : p.geometry.holes) coords.push_back(ring_to_json(h));

        json props;
        if (p.id_numeric) {
            props["id"] = std::stoll(p.id);
        } else {
            props["id"] = p.id;
        }
        if (ls.names_in_file) {
            props["luclass"] = ls.categories.name_of(p.category);
        } else {
            props["luclass"] = p.category;
        }
        if (p.parent_id) props["parent_id"] = *p.parent_id;

        features.push_back(json{{"type", "Feature"},
                                {"geometry", json{{"type", "Polygon"}, {"coordinates", coords}}},
                                {"properties", props}});
    }
    json doc{{"type", "FeatureCollection"}, {"features", features}};
    return doc.dump(2) + "\n";
}

void write_parcels(const Landscape& ls, const std::string& path) {
    write_text_file(path, serialize_parcels(ls));
}

// ---------------------------------------------------------------------------
// Traces
// ---------------------------------------------------------------------------

std::string serialize_trace(const SimulationTrace& trace, const Landscape& cells) {
    std::ostringstream out;
    json header{{"format_version", 1},
                {"seed", trace.seed},
                {"demand_met", trace.demand_met},
                {"shortfall", trace.shortfall}};
    out << header.dump() << "\n";
    for (const IterationRecord& rec : trace.iterations) {
        json conversions = json::array();
        for (const Conversion& c : rec.conversions) {
            conversions.push_back(json{{"cell", cells.parcels[c.cell].id},
                                       {"from", c.from},
                                       {"to", c.to},
                                       {"p", c.probability}});
        }
        json line{{"iteration", rec.iteration},
                  {"threshold", rec.threshold},
                  {"quota", rec.quota},
                  {"converted_area", rec.converted_area},
                  {"remaining", rec.demand_remaining},
                  {"conversions", conversions}};
        out << line.dump() << "\n";
    }
    return out.str();
}

SimulationTrace parse_trace(const std::string& text, const Landscape& cells) {
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < cells.size(); ++i) index.emplace(cells.parcels[i].id, i);

    SimulationTrace trace;
    std::istringstream in(text);
    std::string line;
    bool header_done = false;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw IoError("trace line " + std::to_string(line_no) + ": " + e.what());
        }
        if (!header_done) {
            if (j.value("format_version", -1) != 1)
                throw IoError("trace: unsupported format_version");
            trace.seed = j.at("seed").get<std::uint64_t>();
            trace.demand_met = j.at("demand_met").get<bool>();
            trace.shortfall = j.at("shortfall").get<std::vector<double>>();
            header_done = true;
            continue;
        }
        IterationRecord rec;
        rec.iteration = j.at("iteration").get<int>();
        rec.threshold = j.at("threshold").get<double>();
        rec.quota = j.at("quota").get<double>();
        rec.converted_area = j.at("converted_area").get<double>();
        rec.demand_remaining = j.at("remaining").get<std::vector<double>>();
        for (const json& c : j.at("conversions")) {
            const std::string id = c.at("cell").get<std::string>();
            auto it = index.find(id);
            if (it == index.end()) throw IoError("trace: unknown cell id " + id);
            rec.conversions.push_back({it->second, c.at("from").get<int>(),
                                       c.at("to").get<int>(), c.at("p").get<double>()});
        }
        trace.iterations.push_back(std::move(rec));
    }
    if (!header_done) throw IoError("trace: missing header line");
    return trace;
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

json accuracy_to_json(const AccuracyReport& r) {
    return json{{"format_version", 1},
                {"mode", r.mode == AssessMode::Area ? "area" : "count"},
                {"fom", r.fom},
                {"pa", r.pa},
                {"ua", r.ua},
                {"a", r.confusion.a},
                {"b", r.confusion.b},
                {"c", r.confusion.c},
                {"d", r.confusion.d}};
}

std::string accuracy_csv(const AccuracyReport& r) {
    std::ostringstream out;
    out << "fom,pa,ua,a,b,c,d,mode\n";
    out << format_double(r.fom) << ',' << format_double(r.pa) << ',' << format_double(r.ua)
        << ',' << format_double(r.confusion.a) << ',' << format_double(r.confusion.b) << ','
        << format_double(r.confusion.c) << ',' << format_double(r.confusion.d) << ','
        << (r.mode == AssessMode::Area ? "area" : "count") << "\n";
    return out.str();
}

json landscape_report_to_json(const LandscapeReport& r, const CategoryTable* categories) {
    json j{{"format_version", 1},
           {"np", r.np},
           {"lpi", r.lpi},
           {"para", r.para},
           {"adjacency_tol", r.adjacency_tol},
           {"filter", r.filter}};
    if (r.enn) {
        j["enn"] = *r.enn;
    } else {
        j["enn"] = nullptr;
    }
    json per_cat = json::array();
    for (std::size_t c = 0; c < r.per_category.size(); ++c) {
        const auto& ci = r.per_category[c];
        json e{{"category", categories ? json(categories->name_of(static_cast<int>(c)))
                                       : json(static_cast<int>(c))},
               {"np", ci.np},
               {"lpi", ci.lpi},
               {"para", ci.para}};
        if (ci.enn) {
            e["enn"] = *ci.enn;
        } else {
            e["enn"] = nullptr;
        }
        per_cat.push_back(std::move(e));
    }
    j["per_category"] = std::move(per_cat);
    return j;
}

std::string landscape_report_csv(const LandscapeReport& r) {
    std::ostringstream out;
    out << "np,lpi,enn,para\n";
    out << r.np << ',' << format_double(r.lpi) << ','
        << (r.enn ? format_double(*r.enn) : std::string()) << ',' << format_double(r.para)
        << "\n";
    return out.str();
}

json crosstab_to_json(const CrossTab& ct, const CategoryTable& categories) {
    json rows = json::array();
    for (int r = 0; r < ct.k; ++r) {
        json row = json::array();
        for (int c = 0; c < ct.k; ++c) row.push_back(ct.at(r, c));
        rows.push_back(std::move(row));
    }
    return json{{"format_version", 1},
                {"categories", categories.names()},
                {"period_years", ct.period_years},
                {"areas", std::move(rows)}};
}

std::string crosstab_csv(const CrossTab& ct, const CategoryTable& categories) {
    std::ostringstream out;
    out << "from\\to";
    for (int c = 0; c < ct.k; ++c) out << ',' << categories.name_of(c);
    out << "\n";
    for (int r = 0; r < ct.k; ++r) {
        out << categories.name_of(r);
        for (int c = 0; c < ct.k; ++c) out << ',' << format_double(ct.at(r, c));
        out << "\n";
    }
    return out.str();
}

json demand_to_json(const Demand& d, const CategoryTable& categories) {
    json targets;
    for (int c = 0; c < categories.size(); ++c)
        targets[categories.name_of(c)] = d.target_area[static_cast<std::size_t>(c)];
    return json{{"format_version", 1}, {"target_area", targets}};
}

std::string sweep_csv(const SweepResult& sweep) {
    std::ostringstream out;
    out << "radius,fom,pa,ua\n";
    for (const SweepRow& row : sweep.rows)
        out << format_double(row.radius) << ',' << format_double(row.fom) << ','
            << format_double(row.pa) << ',' << format_double(row.ua) << "\n";
    return out.str();
}

// ---------------------------------------------------------------------------
// Feature matrices
// ---------------------------------------------------------------------------

std::string serialize_features(const FeatureMatrix& m) {
    std::ostringstream out;
    out << "id";
    for (const auto& name : m.variable_names) out << ',' << name;
    out << "\n";
    for (std::size_t r = 0; r < m.rows(); ++r) {
        out << m.parcel_ids[r];
        for (std::size_t c = 0; c < m.cols(); ++c) out << ',' << format_double(m.at(r, c));
        out << "\n";
    }
    return out.str();
}

FeatureMatrix parse_features(const std::string& text) {
    FeatureMatrix m;
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw IoError("features: empty file");
    std::istringstream hdr(line);
    std::string tok;
    bool first = true;
    while (std::getline(hdr, tok, ',')) {
        if (first) {
            if (tok != "id") throw IoError("features: first column must be 'id'");
            first = false;
        } else {
            m.variable_names.push_back(tok);
        }
    }
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string cell;
        if (!std::getline(row, cell, ','))
            throw IoError("features line " + std::to_string(line_no) + ": missing id");
        m.parcel_ids.push_back(cell);
        std::size_t got = 0;
        while (std::getline(row, cell, ',')) {
            try {
                m.values.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw IoError("features line " + std::to_string(line_no) + ": bad number '" +
                              cell + "'");
            }
            ++got;
        }
        if (got != m.variable_names.size())
            throw IoError("features line " + std::to_string(line_no) + ": expected " +
                          std::to_string(m.variable_names.size()) + " values, got " +
                          std::to_string(got));
    }
    return m;
}

} // namespace parcelca::io

#include "json.hpp"
#include "crsim/errors.hpp"
#include "crsim/microcode.hpp"

namespace crsim {

using nlohmann::json;

std::string program_to_json(const Program& p, int indent) {
    json j;
    j["scheme"] = to_string(p.scheme);
    j["n"] = p.n;
    j["subtract"] = p.subtract;
    j["devices"] = p.declared_devices;
    json layout = json::array();
    for (const auto& a : p.arrays) layout.push_back({{"wl", a.wordline}, {"bitlines", a.bitlines}});
    j["layout"] = layout;

    json steps = json::array();
    for (const auto& s : p.steps) {
        json js;
        js["annotation"] = to_string(s.annotation);
        json arrays = json::array();
        for (const auto& d : s.arrays) {
            json bls = json::array();
            for (const auto& b : d.bls) bls.push_back(to_string(b));
            arrays.push_back({{"array", d.array}, {"wl", to_string(d.wl)}, {"bls", bls}});
        }
        js["arrays"] = arrays;
        json reads = json::array();
        json latches = json::array();
        for (const auto& r : s.reads) {
            reads.push_back(to_string(r.cell));
            if (r.latch) latches.push_back({{"cell", to_string(r.cell)}, {"reg", *r.latch}});
        }
        js["reads"] = reads;
        js["latches"] = latches;
        steps.push_back(std::move(js));
    }
    j["steps"] = steps;

    json result = json::array();
    for (const auto& c : p.result_cells) result.push_back(to_string(c));
    j["result"] = result;
    return j.dump(indent);
}

Program program_from_json(std::string_view text) {
    json j;
    try {
        j = json::parse(text.begin(), text.end());
    } catch (const json::exception& e) {
        throw ArgumentError(std::string("program JSON: ") + e.what());
    }
    try {
        Program p;
        p.scheme = parse_scheme(j.at("scheme").get<std::string>());
        p.n = j.at("n").get<int>();
        p.subtract = j.value("subtract", false);
        p.declared_devices = j.value("devices", 0);
        for (const auto& a : j.at("layout")) {
            p.arrays.push_back({a.at("wl").get<int>(), a.at("bitlines").get<int>()});
        }
        for (const auto& js : j.at("steps")) {
            Step s;
            s.annotation = parse_annotation(js.at("annotation").get<std::string>());
            for (const auto& d : js.at("arrays")) {
                ArrayDrive drive;
                drive.array = d.at("array").get<int>();
                drive.wl = parse_signal(d.at("wl").get<std::string>());
                for (const auto& b : d.at("bls")) drive.bls.push_back(parse_signal(b.get<std::string>()));
                s.arrays.push_back(std::move(drive));
            }
            for (const auto& r : js.at("reads")) s.reads.push_back({parse_cell(r.get<std::string>()), std::nullopt});
            for (const auto& l : js.value("latches", json::array())) {
                const CellAddr cell = parse_cell(l.at("cell").get<std::string>());
                bool matched = false;
                for (auto& r : s.reads) {
                    if (r.cell == cell) {
                        r.latch = l.at("reg").get<std::string>();
                        matched = true;
                    }
                }
                if (!matched) throw ArgumentError("program JSON: latch on a cell that is not read");
            }
            p.steps.push_back(std::move(s));
        }
        for (const auto& c : j.at("result")) p.result_cells.push_back(parse_cell(c.get<std::string>()));
        return p;
    } catch (const json::exception& e) {
        throw ArgumentError(std::string("program JSON: ") + e.what());
    }
}

}  // namespace crsim

#include "mribow/io.hpp"

#include <bit>
#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "mribow/error.hpp"
#include "mribow/text.hpp"

namespace mribow {

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("missing file '" + path.string() + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw DataError("failed to write '" + path.string() + "'");
}

namespace {

using nlohmann::json;

std::filesystem::path strip_suffix(const std::filesystem::path& path,
                                   std::string_view suffix) {
    std::string s = path.string();
    if (s.size() >= suffix.size() && s.ends_with(suffix)) {
        return std::filesystem::path(s.substr(0, s.size() - suffix.size()));
    }
    return path;
}

std::vector<char> read_binary_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary | std::ios::ate);
    if (!in) throw DataError("missing file '" + path.string() + "'");
    auto size = in.tellg();
    std::vector<char> bytes(static_cast<std::size_t>(size));
    in.seekg(0);
    in.read(bytes.data(), size);
    if (!in) throw DataError("short read from '" + path.string() + "'");
    return bytes;
}

json parse_json_file(const std::filesystem::path& path) {
    json j = json::parse(read_text_file(path), nullptr, false);
    if (j.is_discarded()) throw DataError("malformed JSON in '" + path.string() + "'");
    return j;
}

Dims dims_from_json(const json& j, const std::filesystem::path& path) {
    if (!j.contains("dims") || !j["dims"].is_array() || j["dims"].size() != 3) {
        throw DataError("bad dims in '" + path.string() + "'");
    }
    Dims d;
    d.nz = j["dims"][0].get<std::size_t>();
    d.ny = j["dims"][1].get<std::size_t>();
    d.nx = j["dims"][2].get<std::size_t>();
    return d;
}

std::uint32_t load_le32(const char* p) {
    auto b = [&](int i) { return std::uint32_t(static_cast<unsigned char>(p[i])); };
    return b(0) | (b(1) << 8) | (b(2) << 16) | (b(3) << 24);
}

void store_le32(std::uint32_t v, char* p) {
    p[0] = static_cast<char>(v & 0xff);
    p[1] = static_cast<char>((v >> 8) & 0xff);
    p[2] = static_cast<char>((v >> 16) & 0xff);
    p[3] = static_cast<char>((v >> 24) & 0xff);
}

}  // namespace

MetricVolume load_volume(const std::filesystem::path& path) {
    auto stem = strip_suffix(path, ".vol.json");
    auto header_path = stem;
    header_path += ".vol.json";
    auto raw_path = stem;
    raw_path += ".vol.raw";

    json header = parse_json_file(header_path);
    MetricVolume v;
    v.subject_id = header.at("subject_id").get<std::string>();
    v.metric = parse_metric(header.at("metric").get<std::string>());
    v.dims = dims_from_json(header, header_path);

    auto bytes = read_binary_file(raw_path);
    if (bytes.size() != v.dims.total() * 4) {
        std::ostringstream os;
        os << "'" << raw_path.string() << "': voxel count mismatch (header "
           << v.dims.total() << ", payload " << bytes.size() / 4 << ")";
        throw DataError(os.str());
    }
    v.voxels.resize(v.dims.total());
    for (std::size_t i = 0; i < v.voxels.size(); ++i) {
        float f = std::bit_cast<float>(load_le32(bytes.data() + 4 * i));
        v.voxels[i] = static_cast<double>(f);  // lossless widening
    }
    validate_volume(v);
    return v;
}

void write_volume(const MetricVolume& v, const std::filesystem::path& path) {
    validate_volume(v);
    auto stem = strip_suffix(path, ".vol.json");

    json header;
    header["subject_id"] = v.subject_id;
    header["metric"] = std::string(to_string(v.metric));
    header["dims"] = {v.dims.nz, v.dims.ny, v.dims.nx};
    auto header_path = stem;
    header_path += ".vol.json";
    write_text_file(header_path, header.dump(2) + "\n");

    std::string bytes(v.voxels.size() * 4, '\0');
    for (std::size_t i = 0; i < v.voxels.size(); ++i) {
        float f = static_cast<float>(v.voxels[i]);
        store_le32(std::bit_cast<std::uint32_t>(f), bytes.data() + 4 * i);
    }
    auto raw_path = stem;
    raw_path += ".vol.raw";
    write_text_file(raw_path, bytes);
}

RoiMask load_mask(const std::filesystem::path& path) {
    auto stem = strip_suffix(path, ".mask.json");
    auto header_path = stem;
    header_path += ".mask.json";
    auto raw_path = stem;
    raw_path += ".mask.raw";

    json header = parse_json_file(header_path);
    RoiMask m;
    m.region = parse_region(header.at("region").get<std::string>());
    m.dims = dims_from_json(header, header_path);

    auto bytes = read_binary_file(raw_path);
    if (bytes.size() != m.dims.total()) {
        std::ostringstream os;
        os << "'" << raw_path.string() << "': voxel count mismatch (header "
           << m.dims.total() << ", payload " << bytes.size() << ")";
        throw DataError(os.str());
    }
    m.bits.assign(bytes.begin(), bytes.end());
    validate_mask(m);
    return m;
}

void write_mask(const RoiMask& m, const std::filesystem::path& path) {
    validate_mask(m);
    auto stem = strip_suffix(path, ".mask.json");

    json header;
    header["region"] = std::string(to_string(m.region));
    header["dims"] = {m.dims.nz, m.dims.ny, m.dims.nx};
    auto header_path = stem;
    header_path += ".mask.json";
    write_text_file(header_path, header.dump(2) + "\n");

    std::string bytes(reinterpret_cast<const char*>(m.bits.data()), m.bits.size());
    auto raw_path = stem;
    raw_path += ".mask.raw";
    write_text_file(raw_path, bytes);
}

std::vector<ClinicalRecord> load_clinical(const std::filesystem::path& path) {
    std::string text = read_text_file(path);
    std::vector<std::string_view> lines = split(text, '\n');
    if (lines.empty() || trim(lines.front()) != kClinicalHeader) {
        throw DataError("'" + path.string() + "': clinical CSV header must be '" +
                        std::string(kClinicalHeader) + "'");
    }

    std::vector<ClinicalRecord> records;
    std::set<std::string> seen;
    for (std::size_t li = 1; li < lines.size(); ++li) {
        std::string_view line = trim(lines[li]);
        if (line.empty()) continue;
        auto fields = split(line, ',');
        if (fields.size() != 8) {
            throw DataError("'" + path.string() + "' line " + std::to_string(li + 1) +
                            ": expected 8 fields, got " + std::to_string(fields.size()));
        }
        ClinicalRecord r;
        r.subject_id = std::string(trim(fields[0]));
        r.age = parse_double_strict(trim(fields[1]), "age");
        r.sex = static_cast<int>(parse_int_strict(trim(fields[2]), "sex"));
        r.stroop = parse_double_strict(trim(fields[3]), "stroop");
        r.sdmt = parse_double_strict(trim(fields[4]), "sdmt");
        r.cvlt = parse_double_strict(trim(fields[5]), "cvlt");
        r.fss = parse_double_strict(trim(fields[6]), "fss");
        r.label = static_cast<int>(parse_int_strict(trim(fields[7]), "label"));
        validate_clinical(r);
        if (!seen.insert(r.subject_id).second) {
            throw DataError("'" + path.string() + "': duplicate subject '" +
                            r.subject_id + "'");
        }
        records.push_back(std::move(r));
    }
    if (records.empty()) {
        throw DataError("'" + path.string() + "': no subject rows");
    }
    return records;
}

void write_clinical(const std::vector<ClinicalRecord>& records,
                    const std::filesystem::path& path) {
    std::ostringstream os;
    os << kClinicalHeader << "\n";
    for (const auto& r : records) {
        validate_clinical(r);
        os << r.subject_id << ',' << format_double(r.age) << ',' << r.sex << ','
           << format_double(r.stroop) << ',' << format_double(r.sdmt) << ','
           << format_double(r.cvlt) << ',' << format_double(r.fss) << ',' << r.label
           << "\n";
    }
    write_text_file(path, os.str());
}

void save_dataset(const Dataset& ds, const std::filesystem::path& dir) {
    ds.validate();
    std::filesystem::create_directories(dir);

    std::vector<ClinicalRecord> records;
    records.reserve(ds.subjects.size());
    for (const auto& s : ds.subjects) records.push_back(s.clinical);
    write_clinical(records, dir / "clinical.csv");

    const auto keys = ds.keys();
    json manifest;
    manifest["clinical"] = "clinical.csv";
    json jkeys = json::array();
    for (const auto& k : keys) {
        jkeys.push_back({std::string(to_string(k.metric)), std::string(to_string(k.region))});
    }
    manifest["keys"] = jkeys;

    std::vector<std::string> files = {"clinical.csv", "manifest.json"};
    json jsubjects = json::array();
    for (const auto& s : ds.subjects) {
        const std::string& sid = s.clinical.subject_id;
        json volumes = json::object();
        json masks = json::object();
        for (const auto& [key, kd] : s.data) {
            std::string mname(to_string(key.metric));
            std::string rname(to_string(key.region));
            std::string vstem = "volumes/" + sid + "_" + mname;
            std::string mstem = "masks/" + sid + "_" + rname;
            if (!volumes.contains(mname)) {
                write_volume(*kd.volume, dir / vstem);
                volumes[mname] = vstem;
                files.push_back(vstem + ".vol.json");
                files.push_back(vstem + ".vol.raw");
            }
            if (!masks.contains(rname)) {
                write_mask(*kd.mask, dir / mstem);
                masks[rname] = mstem;
                files.push_back(mstem + ".mask.json");
                files.push_back(mstem + ".mask.raw");
            }
        }
        jsubjects.push_back({{"id", sid}, {"volumes", volumes}, {"masks", masks}});
    }
    manifest["subjects"] = jsubjects;
    std::sort(files.begin(), files.end());
    manifest["files"] = files;
    write_text_file(dir / "manifest.json", manifest.dump(2) + "\n");
}

Dataset load_dataset(const std::filesystem::path& dir) {
    json manifest = parse_json_file(dir / "manifest.json");

    auto clinical = load_clinical(dir / manifest.at("clinical").get<std::string>());
    std::map<std::string, const ClinicalRecord*> by_id;
    for (const auto& r : clinical) by_id[r.subject_id] = &r;

    std::vector<FeatureKey> keys;
    for (const auto& jk : manifest.at("keys")) {
        keys.push_back({parse_metric(jk.at(0).get<std::string>()),
                        parse_region(jk.at(1).get<std::string>())});
    }

    Dataset ds;
    for (const auto& js : manifest.at("subjects")) {
        std::string sid = js.at("id").get<std::string>();
        auto it = by_id.find(sid);
        if (it == by_id.end()) {
            throw DataError("manifest subject '" + sid + "' missing from clinical.csv");
        }
        SubjectEntry entry;
        entry.clinical = *it->second;

        std::map<MetricId, std::shared_ptr<const MetricVolume>> volumes;
        std::map<RegionId, std::shared_ptr<const RoiMask>> masks;
        for (const auto& key : keys) {
            auto vit = volumes.find(key.metric);
            if (vit == volumes.end()) {
                std::string rel = js.at("volumes").at(std::string(to_string(key.metric)))
                                      .get<std::string>();
                auto vol = std::make_shared<MetricVolume>(load_volume(dir / rel));
                if (vol->subject_id != sid) {
                    throw DataError("volume '" + rel + "' belongs to '" +
                                    vol->subject_id + "', expected '" + sid + "'");
                }
                vit = volumes.emplace(key.metric, std::move(vol)).first;
            }
            auto mit = masks.find(key.region);
            if (mit == masks.end()) {
                std::string rel = js.at("masks").at(std::string(to_string(key.region)))
                                      .get<std::string>();
                mit = masks.emplace(key.region,
                                    std::make_shared<RoiMask>(load_mask(dir / rel)))
                          .first;
            }
            entry.data.emplace(key, KeyData{vit->second, mit->second});
        }
        ds.subjects.push_back(std::move(entry));
    }
    ds.validate();
    return ds;
}

}  // namespace mribow

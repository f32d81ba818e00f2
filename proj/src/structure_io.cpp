#include "diffrefine/structure_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "diffrefine/rng.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace diffrefine {

namespace {

constexpr const char* kAaOrder = "ACDEFGHIKLMNPQRSTVWY";

const std::map<std::string, char>& three_to_one() {
    static const std::map<std::string, char> m = {
        {"ALA", 'A'}, {"CYS", 'C'}, {"ASP", 'D'}, {"GLU", 'E'}, {"PHE", 'F'},
        {"GLY", 'G'}, {"HIS", 'H'}, {"ILE", 'I'}, {"LYS", 'K'}, {"LEU", 'L'},
        {"MET", 'M'}, {"ASN", 'N'}, {"PRO", 'P'}, {"GLN", 'Q'}, {"ARG", 'R'},
        {"SER", 'S'}, {"THR", 'T'}, {"VAL", 'V'}, {"TRP", 'W'}, {"TYR", 'Y'}};
    return m;
}

std::string one_to_three(char aa) {
    for (const auto& [name, code] : three_to_one()) {
        if (code == aa) return name;
    }
    return "UNK";
}

int atom_index(const std::string& name) {
    if (name == "N") return static_cast<int>(BackboneAtom::N);
    if (name == "CA") return static_cast<int>(BackboneAtom::CA);
    if (name == "C") return static_cast<int>(BackboneAtom::C);
    if (name == "O") return static_cast<int>(BackboneAtom::O);
    return -1;
}

std::string strip(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

double parse_coord(const std::string& line, std::size_t col) {
    const std::string field = strip(line.substr(col, 8));
    try {
        std::size_t pos = 0;
        const double v = std::stod(field, &pos);
        if (pos != field.size() || !std::isfinite(v)) throw std::invalid_argument(field);
        return v;
    } catch (const std::exception&) {
        throw ParseError("bad coordinate field '" + field + "' in: " + line);
    }
}

}  // namespace

std::vector<char> BackboneStructure::sequence() const {
    std::vector<char> seq;
    seq.reserve(residues.size());
    for (const Residue& r : residues) seq.push_back(r.aa);
    return seq;
}

std::vector<Vec3> BackboneStructure::ca_positions() const {
    std::vector<Vec3> out;
    out.reserve(residues.size());
    for (const Residue& r : residues) out.push_back(r.ca());
    return out;
}

DecoyPair DecoyPair::make(BackboneStructure decoy, BackboneStructure reference,
                          std::string target_id) {
    if (decoy.size() != reference.size()) {
        throw MismatchedPair("decoy/reference residue counts differ: " +
                             std::to_string(decoy.size()) + " vs " +
                             std::to_string(reference.size()));
    }
    for (std::size_t i = 0; i < decoy.size(); ++i) {
        if (decoy.residues[i].aa != reference.residues[i].aa) {
            throw MismatchedPair("sequence mismatch at residue " + std::to_string(i));
        }
    }
    return DecoyPair{std::move(decoy), std::move(reference), std::move(target_id)};
}

BackboneStructure parse_pdb_backbone(std::istream& in, char chain) {
    struct PendingResidue {
        int seq_index = 0;
        char icode = ' ';
        char aa = 'X';
        std::array<Vec3, kBackboneAtomCount> atoms{};
        std::array<bool, kBackboneAtomCount> have{};
    };

    std::vector<PendingResidue> pending;
    char selected_chain = chain;
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind("ATOM", 0) != 0) continue;
        if (line.size() < 54) throw ParseError("truncated ATOM record: " + line);

        const char altloc = line[16];
        if (altloc != ' ' && altloc != 'A') continue;

        const char line_chain = line[21];
        if (selected_chain == 0) selected_chain = line_chain;
        if (line_chain != selected_chain) continue;

        const int idx = atom_index(strip(line.substr(12, 4)));
        if (idx < 0) continue;

        int resseq = 0;
        try {
            resseq = std::stoi(strip(line.substr(22, 4)));
        } catch (const std::exception&) {
            throw ParseError("bad residue number in: " + line);
        }
        const char icode = line[26];

        if (pending.empty() || pending.back().seq_index != resseq ||
            pending.back().icode != icode) {
            // New residues keyed by (resSeq, iCode) in file order.
            PendingResidue r;
            r.seq_index = resseq;
            r.icode = icode;
            const auto it = three_to_one().find(strip(line.substr(17, 3)));
            r.aa = it == three_to_one().end() ? 'X' : it->second;
            pending.push_back(r);
        }
        PendingResidue& r = pending.back();
        if (!r.have[idx]) {
            r.atoms[idx] = Vec3(parse_coord(line, 30), parse_coord(line, 38),
                                parse_coord(line, 46));
            r.have[idx] = true;
        }
    }

    BackboneStructure s;
    s.chain_id = selected_chain == 0 ? "A" : std::string(1, selected_chain);
    for (const PendingResidue& r : pending) {
        if (std::all_of(r.have.begin(), r.have.end(), [](bool b) { return b; })) {
            s.residues.push_back(Residue{r.seq_index, r.aa, r.atoms});
        } else {
            ++s.dropped_residues;
        }
    }
    if (s.residues.empty()) throw EmptyStructure("no complete backbone residues");

    // Insertion codes or disordered numbering can leave duplicates; fall
    // back to sequential numbering so seq_index stays strictly increasing.
    bool increasing = true;
    for (std::size_t i = 1; i < s.residues.size(); ++i) {
        increasing &= s.residues[i].seq_index > s.residues[i - 1].seq_index;
    }
    if (!increasing) {
        for (std::size_t i = 0; i < s.residues.size(); ++i) {
            s.residues[i].seq_index = static_cast<int>(i) + 1;
        }
    }
    return s;
}

BackboneStructure parse_pdb_backbone(const std::string& text, char chain) {
    std::istringstream in(text);
    return parse_pdb_backbone(in, chain);
}

BackboneStructure load_pdb(const fs::path& path, char chain) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path.string());
    BackboneStructure s = parse_pdb_backbone(in, chain);
    s.source = path.string();
    return s;
}

std::string write_pdb(const BackboneStructure& s) {
    static const char* kNameField[kBackboneAtomCount] = {" N  ", " CA ", " C  ", " O  "};
    static const char* kElement[kBackboneAtomCount] = {" N", " C", " C", " O"};

    const char chain = s.chain_id.empty() ? 'A' : s.chain_id[0];
    std::string out;
    out.reserve(s.size() * 4 * 82 + 160);
    char buf[96];
    int serial = 1;
    for (const Residue& res : s.residues) {
        const std::string resname = one_to_three(res.aa);
        for (int a = 0; a < kBackboneAtomCount; ++a) {
            std::snprintf(buf, sizeof(buf),
                          "ATOM  %5d %s %3s %c%4d    %8.3f%8.3f%8.3f%6.2f%6.2f          %s\n",
                          serial++, kNameField[a], resname.c_str(), chain,
                          res.seq_index, res.atoms[a].x(), res.atoms[a].y(),
                          res.atoms[a].z(), 1.0, 0.0, kElement[a]);
            out += buf;
        }
    }
    if (!s.residues.empty()) {
        const Residue& last = s.residues.back();
        std::snprintf(buf, sizeof(buf), "TER   %5d      %3s %c%4d\n", serial,
                      one_to_three(last.aa).c_str(), chain, last.seq_index);
        out += buf;
    }
    out += "END\n";
    return out;
}

void save_pdb(const BackboneStructure& s, const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << write_pdb(s);
}

namespace {

// Places D given chain atoms A-B-C, the C-D bond length, the B-C-D angle
// and the A-B-C-D torsion (signs match measure via atan2(n1 x u2 . n2, n1 . n2)).
Vec3 place_atom(const Vec3& a, const Vec3& b, const Vec3& c, double bond,
                double angle, double torsion) {
    const Vec3 bc = (c - b).normalized();
    const Vec3 n = ((b - a).normalized().cross(bc)).normalized();
    const Vec3 m = n.cross(bc);
    return c + bond * (-std::cos(angle) * bc +
                       std::sin(angle) * (std::cos(torsion) * m - std::sin(torsion) * n));
}

}  // namespace

BackboneStructure make_synthetic(SyntheticKind kind, int n_res, std::uint64_t seed,
                                 double jitter_deg) {
    if (n_res < 2 || n_res > 512) {
        throw std::invalid_argument("n_res must be in [2, 512]");
    }

    const IdealTemplate& tpl = IdealTemplate::standard();
    const Vec3 n_tpl = tpl.at(BackboneAtom::N);
    const Vec3 c_tpl = tpl.at(BackboneAtom::C);
    const double r_n_ca = n_tpl.norm();
    const double r_ca_c = c_tpl.norm();
    const double theta_n_ca_c = std::acos(n_tpl.normalized().dot(c_tpl.normalized()));
    const double deg = M_PI / 180.0;
    const double theta_ca_c_n = 116.2 * deg;
    const double theta_c_n_ca = 121.7 * deg;

    const double phi0 = (kind == SyntheticKind::Helix ? -57.8 : -135.0) * deg;
    const double psi0 = (kind == SyntheticKind::Helix ? -47.0 : 135.0) * deg;

    Prng rng(seed);
    Prng torsion_rng = rng.child(1);
    Prng seq_rng = rng.child(2);

    std::vector<std::array<Vec3, 3>> chain(n_res);  // N, CA, C per residue
    chain[0] = {n_tpl, Vec3::Zero(), c_tpl};
    for (int i = 1; i < n_res; ++i) {
        const double jitter = jitter_deg * deg;
        const double psi = psi0 + (jitter > 0 ? (2 * torsion_rng.uniform() - 1) * jitter : 0);
        const double phi = phi0 + (jitter > 0 ? (2 * torsion_rng.uniform() - 1) * jitter : 0);
        const auto& prev = chain[i - 1];
        const Vec3 n = place_atom(prev[0], prev[1], prev[2], kPeptideBondLength,
                                  theta_ca_c_n, psi);
        const Vec3 ca = place_atom(prev[1], prev[2], n, r_n_ca, theta_c_n_ca, M_PI);
        const Vec3 c = place_atom(prev[2], n, ca, r_ca_c, theta_n_ca_c, phi);
        chain[i] = {n, ca, c};
    }

    BackboneStructure s;
    s.chain_id = "A";
    s.source = std::string(kind == SyntheticKind::Helix ? "synthetic:helix" :
                                                          "synthetic:extended") +
               ":seed=" + std::to_string(seed);
    s.residues.resize(n_res);
    for (int i = 0; i < n_res; ++i) {
        Residue& res = s.residues[i];
        res.seq_index = i + 1;
        res.aa = kAaOrder[seq_rng.uniform_int(0, 19)];
        res.atom(BackboneAtom::N) = chain[i][0];
        res.atom(BackboneAtom::CA) = chain[i][1];
        res.atom(BackboneAtom::C) = chain[i][2];
        res.atom(BackboneAtom::O) = Vec3::Zero();  // filled from frames below
    }
    const FrameSet frames = frames_from_backbone(s);
    for (int i = 0; i < n_res; ++i) {
        s.residues[i].atom(BackboneAtom::O) = apply(frames[i], tpl.at(BackboneAtom::O));
    }
    return s;
}

Manifest load_manifest(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ManifestError("cannot open manifest " + path.string());
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw ManifestError("bad manifest JSON: " + std::string(e.what()));
    }
    if (!doc.is_object() || !doc.contains("entries") || !doc["entries"].is_array()) {
        throw ManifestError("manifest must be an object with an 'entries' array");
    }

    const fs::path base = path.has_parent_path() ? path.parent_path() : fs::path(".");
    Manifest m;
    std::vector<std::string> problems;
    std::map<std::string, int> seen;
    for (const json& e : doc["entries"]) {
        ManifestEntry entry;
        entry.target_id = e.value("target_id", "");
        entry.split = e.value("split", "train");
        const std::string ref = e.value("reference", "");
        const std::string decoy = e.value("decoy", "");

        if (entry.target_id.empty()) problems.push_back("entry with empty target_id");
        if (++seen[entry.target_id] > 1) {
            problems.push_back("duplicate target_id '" + entry.target_id + "'");
        }
        if (entry.split != "train" && entry.split != "val" && entry.split != "test") {
            problems.push_back(entry.target_id + ": bad split '" + entry.split + "'");
        }
        if (ref.empty()) {
            problems.push_back(entry.target_id + ": missing reference path");
        } else {
            entry.reference_path = fs::path(ref).is_absolute() ? fs::path(ref) : base / ref;
            if (!fs::exists(entry.reference_path)) {
                problems.push_back(entry.target_id + ": no such file " +
                                   entry.reference_path.string());
            }
        }
        if (!decoy.empty()) {
            entry.decoy_path = fs::path(decoy).is_absolute() ? fs::path(decoy) : base / decoy;
            if (decoy == ref) {
                problems.push_back(entry.target_id + ": decoy and reference paths equal");
            }
            if (!fs::exists(entry.decoy_path)) {
                problems.push_back(entry.target_id + ": no such file " +
                                   entry.decoy_path.string());
            }
        }
        m.entries.push_back(entry);
    }
    if (!problems.empty()) {
        std::string msg = "invalid manifest " + path.string() + ":";
        for (const std::string& p : problems) msg += "\n  " + p;
        throw ManifestError(msg);
    }
    return m;
}

void save_manifest(const Manifest& m, const fs::path& path) {
    json doc;
    doc["entries"] = json::array();
    const fs::path base = path.has_parent_path() ? path.parent_path() : fs::path(".");
    for (const ManifestEntry& e : m.entries) {
        json j;
        j["target_id"] = e.target_id;
        j["split"] = e.split;
        j["reference"] = fs::relative(e.reference_path, base).string();
        if (!e.decoy_path.empty()) {
            j["decoy"] = fs::relative(e.decoy_path, base).string();
        }
        doc["entries"].push_back(j);
    }
    std::ofstream out(path);
    if (!out) throw ManifestError("cannot write manifest " + path.string());
    out << doc.dump(2) << "\n";
}

}  // namespace diffrefine

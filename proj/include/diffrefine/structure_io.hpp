#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "diffrefine/geometry.hpp"

namespace diffrefine {

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct EmptyStructure : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ManifestError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct LengthMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct MismatchedPair : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Residue {
    int seq_index = 0;
    char aa = 'A';  // one-letter code, 'X' for unknown
    std::array<Vec3, kBackboneAtomCount> atoms{};  // indexed by BackboneAtom

    const Vec3& atom(BackboneAtom a) const { return atoms[static_cast<int>(a)]; }
    Vec3& atom(BackboneAtom a) { return atoms[static_cast<int>(a)]; }
    const Vec3& ca() const { return atom(BackboneAtom::CA); }
};

struct BackboneStructure {
    std::vector<Residue> residues;
    std::string chain_id = "A";
    std::string source;
    int dropped_residues = 0;  // residues skipped on parse for missing atoms

    std::size_t size() const { return residues.size(); }
    std::vector<char> sequence() const;
    std::vector<Vec3> ca_positions() const;
};

// Decoy / reference pairing; construction enforces equal lengths and
// identical sequences.
struct DecoyPair {
    BackboneStructure decoy;
    BackboneStructure reference;
    std::string target_id;

    static DecoyPair make(BackboneStructure decoy, BackboneStructure reference,
                          std::string target_id);
};

struct ManifestEntry {
    std::string target_id;
    std::filesystem::path decoy_path;
    std::filesystem::path reference_path;
    std::string split = "train";  // train | val | test
};

struct Manifest {
    std::vector<ManifestEntry> entries;
};

// Reads ATOM records for N/CA/C/O of the selected chain (first chain seen
// when chain == 0). Keeps altloc ' ' or 'A'; residues missing any of the
// four atoms are dropped and counted in dropped_residues.
BackboneStructure parse_pdb_backbone(std::istream& in, char chain = 0);
BackboneStructure parse_pdb_backbone(const std::string& text, char chain = 0);
BackboneStructure load_pdb(const std::filesystem::path& path, char chain = 0);

// Fixed-column ATOM records, 3-decimal coordinates, occupancy 1.00,
// B-factor 0.00, followed by TER and END.
std::string write_pdb(const BackboneStructure& s);
void save_pdb(const BackboneStructure& s, const std::filesystem::path& path);

enum class SyntheticKind { Helix, Extended };

// Builds an ideal alpha-helix or extended strand by internal-coordinate
// chain extension with template-consistent bonds and angles, so
// frames_from_backbone/atoms_from_frames round-trip exactly. jitter_deg
// perturbs phi/psi per residue (omega stays trans), giving per-seed
// variety without touching bond geometry.
BackboneStructure make_synthetic(SyntheticKind kind, int n_res, std::uint64_t seed,
                                 double jitter_deg = 0.0);

// JSON manifest; relative paths resolve against the manifest's directory.
// Validation rejects duplicate target ids and missing files, listing every
// offending entry in the error message.
Manifest load_manifest(const std::filesystem::path& path);
void save_manifest(const Manifest& m, const std::filesystem::path& path);

}  // namespace diffrefine

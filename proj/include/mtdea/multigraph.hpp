#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace mtdea {

using NodeId = int;
using RelId = int;

struct Triplet {
    NodeId head = 0;
    RelId rel = 0;
    NodeId tail = 0;
    auto operator<=>(const Triplet&) const = default;
};

/// Attributed multigraph: N nodes, R relation types, and a set of directed
/// typed triplets kept sorted and duplicate-free (canonical form).
class Multigraph {
public:
    Multigraph(int num_nodes, int num_relations, std::vector<Triplet> triplets);

    int num_nodes() const { return num_nodes_; }
    int num_relations() const { return num_relations_; }
    const std::vector<Triplet>& triplets() const { return triplets_; }
    std::size_t num_triplets() const { return triplets_.size(); }

    bool contains(const Triplet& t) const;
    bool operator==(const Multigraph& other) const = default;

    /// Directed edge list (head, tail) of one relation's subgraph.
    std::vector<std::pair<int, int>> relation_edges(RelId r) const;

    /// All edges with relation ids dropped, duplicates removed (the
    /// relation-collapsed view used by the homogeneous baseline).
    std::vector<std::pair<int, int>> collapsed_edges() const;

private:
    int num_nodes_;
    int num_relations_;
    std::vector<Triplet> triplets_;
};

/// Set of triplets hidden from an observable graph.
struct TripletMask {
    std::vector<Triplet> hidden;  // canonicalized on use
};

struct MaskSplit {
    Multigraph observable;
    Multigraph hidden;
};

/// observable = A minus mask, hidden = the masked triplets; the two parts
/// partition A. Mask entries must exist in A.
MaskSplit mask_split(const Multigraph& a, const TripletMask& mask);

// Canonical TSV serialization: header line "N<TAB>R", then one triplet per
// line "head<TAB>rel<TAB>tail", decimal ids, LF-terminated.
void write_multigraph(std::ostream& os, const Multigraph& g);
Multigraph read_multigraph(std::istream& is);
void save_multigraph(const Multigraph& g, const std::string& path);
Multigraph load_multigraph(const std::string& path);

}  // namespace mtdea

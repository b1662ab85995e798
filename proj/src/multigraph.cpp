#include "mtdea/multigraph.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "mtdea/errors.hpp"

namespace mtdea {

Multigraph::Multigraph(int num_nodes, int num_relations, std::vector<Triplet> triplets)
    : num_nodes_(num_nodes), num_relations_(num_relations), triplets_(std::move(triplets)) {
    if (num_nodes_ < 2 || num_relations_ < 2)
        throw ContractViolation("Multigraph: requires N >= 2 and R >= 2");
    std::sort(triplets_.begin(), triplets_.end());
    triplets_.erase(std::unique(triplets_.begin(), triplets_.end()), triplets_.end());
    for (const Triplet& t : triplets_) {
        if (t.head < 0 || t.head >= num_nodes_ || t.tail < 0 || t.tail >= num_nodes_)
            throw ContractViolation("Multigraph: node id out of range");
        if (t.rel < 0 || t.rel >= num_relations_) throw ContractViolation("Multigraph: relation id out of range");
    }
}

bool Multigraph::contains(const Triplet& t) const {
    return std::binary_search(triplets_.begin(), triplets_.end(), t);
}

std::vector<std::pair<int, int>> Multigraph::relation_edges(RelId r) const {
    std::vector<std::pair<int, int>> edges;
    for (const Triplet& t : triplets_)
        if (t.rel == r) edges.emplace_back(t.head, t.tail);
    return edges;
}

std::vector<std::pair<int, int>> Multigraph::collapsed_edges() const {
    std::vector<std::pair<int, int>> edges;
    edges.reserve(triplets_.size());
    for (const Triplet& t : triplets_) edges.emplace_back(t.head, t.tail);
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    return edges;
}

MaskSplit mask_split(const Multigraph& a, const TripletMask& mask) {
    std::vector<Triplet> hidden = mask.hidden;
    std::sort(hidden.begin(), hidden.end());
    hidden.erase(std::unique(hidden.begin(), hidden.end()), hidden.end());
    for (const Triplet& t : hidden)
        if (!a.contains(t)) throw ContractViolation("mask_split: mask references a triplet absent from the graph");
    std::vector<Triplet> observable;
    observable.reserve(a.num_triplets() - hidden.size());
    std::set_difference(a.triplets().begin(), a.triplets().end(), hidden.begin(), hidden.end(),
                        std::back_inserter(observable));
    return MaskSplit{Multigraph(a.num_nodes(), a.num_relations(), std::move(observable)),
                     Multigraph(a.num_nodes(), a.num_relations(), std::move(hidden))};
}

void write_multigraph(std::ostream& os, const Multigraph& g) {
    os << g.num_nodes() << '\t' << g.num_relations() << '\n';
    for (const Triplet& t : g.triplets()) os << t.head << '\t' << t.rel << '\t' << t.tail << '\n';
}

namespace {

int parse_int_field(const std::string& field, int line_no) {
    std::size_t pos = 0;
    int value = 0;
    try {
        value = std::stoi(field, &pos);
    } catch (const std::exception&) {
        throw ParseError("line " + std::to_string(line_no) + ": expected integer, got \"" + field + "\"");
    }
    if (pos != field.size())
        throw ParseError("line " + std::to_string(line_no) + ": trailing characters in \"" + field + "\"");
    return value;
}

std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        std::size_t tab = line.find('\t', start);
        if (tab == std::string::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, tab - start));
        start = tab + 1;
    }
    return fields;
}

}  // namespace

Multigraph read_multigraph(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw ParseError("line 1: missing header");
    auto header = split_tabs(line);
    if (header.size() != 2) throw ParseError("line 1: header must be N<TAB>R");
    const int n = parse_int_field(header[0], 1);
    const int r = parse_int_field(header[1], 1);

    std::vector<Triplet> triplets;
    int line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto fields = split_tabs(line);
        if (fields.size() != 3)
            throw ParseError("line " + std::to_string(line_no) + ": expected head<TAB>rel<TAB>tail");
        Triplet t{parse_int_field(fields[0], line_no), parse_int_field(fields[1], line_no),
                  parse_int_field(fields[2], line_no)};
        triplets.push_back(t);
    }
    return Multigraph(n, r, std::move(triplets));
}

void save_multigraph(const Multigraph& g, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open for writing: " + path);
    write_multigraph(os, g);
    if (!os) throw IoError("write failed: " + path);
}

Multigraph load_multigraph(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open: " + path);
    return read_multigraph(is);
}

}  // namespace mtdea

#pragma once

#include <cstddef>
#include <vector>

namespace blobgraph::testing {

struct FixtureQuery {
  const char* name;
  const char* text;
  std::size_t qnodes;
  std::size_t qedges;
  std::size_t attached;  // single-variable WHERE/inline filters
  std::size_t detached;  // multi-variable predicates, filter or projection role
};

// Query statements from the running example and the benchmark suite, with
// hand-derived query-graph shapes. The pet query uses `m` where the original
// text refers to an unbound `n3`.
inline const std::vector<FixtureQuery>& fixture_queries() {
  static const std::vector<FixtureQuery> q = {
      {"create_teammates",
       "CREATE (jordan:Person{name: 'Michael Jordan'})\n"
       "CREATE (scott:Person{name: 'Scott Pippen'})\n"
       "CREATE (jordan)-[:teamMate]->(scott);",
       0, 0, 0, 0},
      {"teammate_name",
       "MATCH (jordan)-[:teamMate]->(n)\nWHERE jordan.name='Michael Jordan'\nRETURN n.name;", 2, 1, 1, 0},
      {"teammate_name_labelled",
       "MATCH (n:Person)-[:teamMate]->(m:Person) WHERE n.name='Michael Jordan' RETURN m.name;", 2, 1, 1, 0},
      {"teammate_jersey",
       "MATCH (n:Person)-[:teamMate]->(m:Person)\nWHERE n.name='Michael Jordan'\nRETURN m.photo->jerseyNumber;",
       2, 1, 1, 0},
      {"pet_is_cat",
       "MATCH (n:Person)-[:hasPet]->(m:Pet)\nWHERE n.name='Michael Jordan'\nRETURN m.photo->animal = 'cat';",
       2, 1, 1, 0},
      {"same_person",
       "MATCH (n1:Person)-[:teamMate]->(n4:Person), (n7:Person)-[:coachOf]->(n6:Team)\n"
       "WHERE n1.name = 'Michael Jordan'\nAND n4.name = 'Kerr'\nAND n6.name = 'Gold State Warriors'\n"
       "AND n7.name = 'Steven Kerr'\nRETURN n4.photo->face ~: n7.photo->face;",
       4, 2, 4, 1},
      {"pet_subproperty",
       "MATCH (n1)-[:hasPet]->(n3) WHERE n1.name = 'Michael Jordan' RETURN n3.photo->animal", 2, 1, 1, 0},
      {"bench_face_lookup",
       "Match (n:person) WHERE n.photo ~: Blob.fromURL('$url') AND n.firstName = '$name' RETURN n;", 1, 0, 2, 0},
      {"bench_shortest_path",
       "MATCH (n:person),(m:person) WHERE m.photo ~: Blob.fromURL('$url') AND n.firstName = '$name' "
       "RETURN shortestPath((n)-[*1..3]-(m));",
       2, 0, 2, 0},
      {"bench_same_face",
       "MATCH (n:person),(m:person) WHERE n.firstName='$name1' AND m.firstName='$name2' RETURN n.photo ~: m.photo;",
       2, 0, 2, 1},
      {"bench_friend_faces",
       "MATCH p = (n:Person)-[:friendOf]->(m:Person) WHERE n.photo ~: m.photo RETURN p;", 2, 1, 0, 1},
  };
  return q;
}

}  // namespace blobgraph::testing

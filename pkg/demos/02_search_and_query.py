"""The three search modes: full-text keywords, semantic fields, raw PatQL."""

from patgraph import (
    FadKnowledgeBase,
    Lexicon,
    OntologyTerm,
    execute_query,
    fgi_pattern_search,
    fulltext_search,
    semantic_search,
)

lexicon = Lexicon([
    OntologyTerm("geometry-type", "cuboid", synonyms=("block",)),
    OntologyTerm("action", "press", synonyms=("push",)),
])
kb = FadKnowledgeBase(lexicon=lexicon)


def annotate(kind, unique_id, title, geometries, fgis):
    design = kb.upsert_design(kind, unique_id, title)
    product = kb.add_product(design, "P1", title.lower())
    for gid, name, typ in geometries:
        kb.add_geometry(product, gid, name, typ)
    for source, target, action, ids in fgis:
        kb.add_fgi(product, source, target, action, ids)


annotate("emergDesign", "corkscrew.sldprt", "Corkscrew",
         [("g1", "latch", "lever"), ("g2", "cover", "lid"),
          ("g3", "can body", "container")],
         [("g1", "g2", "press", ["f1"]), ("g2", "g3", "separates", ["f1"])])
annotate("patent", "US0640004", "Cork extracting apparatus",
         [("g1", "handle", "lever"), ("g2", "cap", "lid")],
         [("g1", "g2", "press", ["f1"])])
annotate("patent", "US0000001", "Toy brick",
         [("g1", "block", "cuboid")], [])

# 1) Full-text: case-insensitive keyword equality over all property values,
#    ranked function > action > the rest; synonym matches score half.
#    "cuboid" expands to its lexicon synonym "block", which hits the
#    designer's name at half weight.
print("fulltext ['press', 'cuboid'] with synonym expansion:")
for hit in fulltext_search(kb, ["press", "cuboid"], expand_synonyms=True):
    print(f"  {hit.unique_id}: rank {hit.match_rank:g}")
    for item in hit.items:
        note = " (via synonym)" if item.via_synonym else ""
        print(f"    {item.element_kind}.{item.property_key} = {item.keyword!r}"
              f" weight {item.weight:g}{note}")

# 2) Semantic fields, AND-combined; an empty request lists everything.
print("\nsemantic {action: press, geometry: lever}:")
for hit in semantic_search(kb, {"action": "press", "geometry": "lever"}):
    print(f"  {hit.unique_id}: rank {hit.match_rank:g}")

print("\nFGI pattern (lever -[press]-> lid, f1):")
for hit in fgi_pattern_search(kb, "lever", "lid", "press", "f1"):
    print(f"  {hit.unique_id}: {hit.match_count} matching interaction(s)")

# 3) Raw PatQL for everything else.
rows = execute_query(kb, """
    match (p: patent)-[:hasProduct]->(pr)
    match (pr)-[:hasGeometry]->(g1)
    match (g1)-[r1:hasFGI]->(g2)
    where "f1" in r1.Function_IDs
    return p, count(r1) as steps
""")
print("\nPatQL: f1 steps per patent:")
for row in rows:
    print(f"  {row['p'].props['Patent_Number']}: {row['steps']}")

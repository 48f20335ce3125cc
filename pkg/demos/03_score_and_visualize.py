"""Score a design against the patent corpus and visualize the overlap."""

from patgraph import (
    AbstractionLevel,
    FadKnowledgeBase,
    compute_overlap,
    score_corpus,
    to_dot,
)
from patgraph.scoring import scores_to_csv

kb = FadKnowledgeBase()


def annotate(kind, unique_id, title, geometries, fgis):
    design = kb.upsert_design(kind, unique_id, title)
    product = kb.add_product(design, "P1", title.lower())
    for gid, name, typ in geometries:
        kb.add_geometry(product, gid, name, typ)
    for source, target, action, ids in fgis:
        kb.add_fgi(product, source, target, action, ids)
    return design


design = annotate("emergDesign", "corkscrew.sldprt", "Corkscrew",
                  [("g1", "latch", "lever"), ("g2", "cover", "lid"),
                   ("g3", "can body", "container")],
                  [("g1", "g2", "press", ["f1"]), ("g2", "g3", "separates", ["f1"])])
annotate("patent", "US0640004", "Cork extracting apparatus",
         [("h1", "handle", "lever"), ("h2", "cap", "lid"),
          ("h3", "body", "container")],
         [("h1", "h2", "press", ["f1"]), ("h2", "h3", "separates", ["f1"])])
annotate("patent", "US0000001", "Pouring spout",
         [("s1", "neck", "spout"), ("s2", "base", "container")],
         [("s1", "s2", "pours", ["f1"])])

# Overlap is counted at three levels (geometry types, directed FGI triples,
# whole functions); the raw match rank is (g*10 + fgi*20 + fn*30)/60 and is
# then min-max normalized across the corpus.
results = score_corpus(kb, design, kind="patent")
print(scores_to_csv(results))

best = results[0]
report = best.overlap
print(f"best match {best.unique_id}: geometries={report.counts.geometries} "
      f"fgis={report.counts.fgis} functions={report.counts.functions}")
for mine, theirs in report.fgi_pairs:
    print(f"  shared interaction: ({mine.source_type} -[{mine.action}]-> "
          f"{mine.target_type})")

# DOT output keeps only geometries and FGIs; the design/product nodes are
# abstracted away. The overlap report highlights the matched elements.
print("\nDOT at ontology-type abstraction, overlap highlighted:")
print(to_dot(kb, design, AbstractionLevel.patmine_type(),
             highlight=compute_overlap(kb, design, "US0640004")))

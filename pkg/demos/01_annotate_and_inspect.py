"""Annotate a design and read the three-level model back.

The running example: a can-opening mechanism where a latch presses the
cover, then the cover separates from the can body — two interaction steps
that together realize one function (f1, "open").
"""

from patgraph import FadKnowledgeBase

kb = FadKnowledgeBase()

# Level one: the design document and its product.
design = kb.upsert_design("emergDesign", "corkscrew.sldprt", "Corkscrew")
product = kb.add_product(design, "P1", "corkscrew")
kb.add_claim(product, "c1", "extracts the cork with minimal force", independent=True)

# Level two: the geometric features. The ontology type (PatMine_type) is
# what downstream matching uses; the name is the designer's own word.
kb.add_geometry(product, "g1", "latch", "lever")
kb.add_geometry(product, "g2", "cover", "lid")
kb.add_geometry(product, "g3", "can body", "container")

# Level three: the functional structure as directed interactions.
kb.add_fgi(product, "g1", "g2", "press", ["f1"], function_name="open")
kb.add_fgi(product, "g2", "g3", "separates", ["f1"], function_name="open")

doc = kb.get_fad("corkscrew.sldprt")
print(f"{doc.kind} {doc.unique_id!r}: {len(doc.products)} product(s), "
      f"{doc.geometry_count()} geometries, {doc.fgi_count()} FGIs")

for prod in doc.products:
    for fgi in prod.fgis:
        print(f"  {fgi.from_geometric_id} -[{fgi.action}]-> {fgi.to_geometric_id} "
              f"(functions: {', '.join(fgi.function_ids)})")

print("\nfunction f1 steps across the knowledge base:")
for step in kb.get_function_structure("f1"):
    print(f"  {step.design.unique_id} / {step.product.product_id}: "
          f"{step.fgi.from_geometric_id} -[{step.fgi.action}]-> {step.fgi.to_geometric_id}")

# Annotating also grows the ontology lexicon: every chosen type and action
# increments its usage counter.
for term in kb.lexicon.terms():
    print(f"lexicon: {term.category}/{term.term} used {term.usage_count}x")

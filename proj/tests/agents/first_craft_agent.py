import json
import sys

# Crafts whatever is craftable once, then submits. Exercises the action leg
# of the wire protocol.
acted = False
for line in sys.stdin:
    obs = json.loads(line)
    if acted:
        print(json.dumps({"type": "submit"}), flush=True)
        continue
    counts = {e["item"]: e["count"] for e in obs["inventory"]}
    choice = None
    for recipe in obs["recipes"]:
        if recipe["kind"] != "craft":
            continue
        need = {}
        for item in recipe["inputs"]:
            need[item] = need.get(item, 0) + 1
        if all(counts.get(i, 0) >= k for i, k in need.items()):
            choice = recipe["id"]
            break
    if choice is None:
        print(json.dumps({"type": "submit"}), flush=True)
    else:
        acted = True
        print(json.dumps({"type": "action", "action": {"kind": "craft", "recipe": choice}}),
              flush=True)

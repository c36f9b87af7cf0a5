"""Walk the HTTP API in-process: sessions, operations, candidates, text."""
import warnings

warnings.filterwarnings("ignore", message="Using `httpx` with `starlette.testclient`")

from fastapi.testclient import TestClient

from axiomforge.ontology import OntologyRegistry, OntologyWarehouse
from axiomforge.service import create_app

TRAVEL = "http://www.example.org/travel/"


def main() -> None:
    registry = OntologyRegistry(OntologyWarehouse("fixtures/warehouse"))
    client = TestClient(create_app(registry))

    for name in ("loc", "trainConnection"):
        summary = client.post("/ontologies", json={"iri": TRAVEL + name}).json()
        print(f"loaded {summary['short_name']}: {summary['concepts']} concepts")

    state = client.post("/axioms").json()
    sid = state["session"]
    print(f"session {sid} opened, axiom {state['axiom_name']}")

    def apply(op: str, **args) -> dict:
        reply = client.post(f"/axioms/{sid}/ops", json={
            "op": op, "args": args, "revision": state["revision"]})
        reply.raise_for_status()
        return reply.json()

    state = apply("create_variable", concept=TRAVEL + "trainConnection#trip")
    trip = state["nodes"][1]["id"]
    state = apply("refine_attribute", node=trip, attribute="start",
                  binding={"kind": "new_var_default"})

    menu = client.get(f"/axioms/{sid}/candidates",
                      params={"target": f"slot:{trip}:duration"}).json()
    print("\nenabled on the duration slot:")
    for cand in menu["enabled"]:
        label = cand["op"] + (f"/{cand['variant']}" if cand.get("variant") else "")
        print(f"  {label}")

    print("\ngenerated text:")
    print(client.get(f"/axioms/{sid}/wsml").text)


if __name__ == "__main__":
    main()

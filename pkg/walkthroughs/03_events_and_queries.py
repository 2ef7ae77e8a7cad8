"""
Raw signal to a 250-event query
===============================

Simulate one read, convert DAC counts to pA, segment into events, drop the
adaptor events and keep the next 250 as a z-scored, quantized query.
"""
import numpy as np

from sdtw_readuntil import dac_to_pa, detect_events, extract_query, synthetic_pore_model
from sdtw_readuntil.simulate import SimParams, simulate_reads

model = synthetic_pore_model(k=6, seed=1)
rng = np.random.default_rng(3)
ref = ("toy", "".join(rng.choice(list("ACGT"), 5000)))
(read,), (truth,) = simulate_reads([ref], model, seed=3, sim=SimParams(n_reads=1, noise_sigma=0.2))

pa = dac_to_pa(read)
print(f"{read.read_id}: {read.raw.size} samples, {read.raw.size / read.sampling_rate:.3f} s of signal")
print("first pA values:", np.round(pa[:6], 2).tolist())

events = detect_events(pa)
lengths = np.array([e.length for e in events])
print(f"{len(events)} events, {lengths.mean():.1f} samples per event on average")

query = extract_query(events, read_id=read.read_id)
print("query:", query.n_events, "events after trimming", query.trimmed_prefix)
print("normalized :", np.round(query.events_normalized[:5], 3).tolist())
print("fixed point:", query.events_fixed[:5].tolist())
print("true end of the query on the reference:", truth.strand, truth.position)

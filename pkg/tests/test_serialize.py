import numpy as np

from gadaboost.boosting import gadaboost_sa_fit, predict_ensemble, samme_fit
from gadaboost.data import inject_label_noise, synth_blobs
from gadaboost.learners import LearnerSpec
from gadaboost.serialize import load_ensemble, save_ensemble


def test_roundtrip_predictions_identical(tmp_path):
    ds = synth_blobs(400, 3, 4, spread=0.2, seed=0, box=2.0)
    ds, _ = inject_label_noise(ds, 0.2, seed=0)
    for fit in (gadaboost_sa_fit, samme_fit):
        ens = fit(ds, LearnerSpec(max_depth=3), 10)
        save_ensemble(ens, tmp_path / "m.json")
        back = load_ensemble(tmp_path / "m.json")
        assert back.betas.tobytes() == ens.betas.tobytes()
        assert back.stop_reason == ens.stop_reason and back.history == ens.history
        assert np.array_equal(predict_ensemble(back, ds), predict_ensemble(ens, ds))
        assert all(a.same_as(b) for (a, _), (b, _) in zip(ens.members, back.members))

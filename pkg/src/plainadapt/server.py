"""HTTP JSON API over the annotation store, served to the rater UI.

Endpoints:
    POST /session                       create a session from run artifacts
    GET  /session/{id}/next?rater=R     next blinded item for a rater
    POST /session/{id}/rating           submit a 4-criterion Likert rating
    GET  /session/{id}/aggregate        qualitative table
"""

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel

from . import corpus as corpus_mod
from .annotation import ConflictError, LikertRating, NotFoundError, SessionStore, create_session
from .errors import ValidationError
from .pipelines import ApproachRun


class CreateSessionBody(BaseModel):
    run_paths: list[str]
    corpus_path: str
    sample_size: int
    seed: int
    rater_ids: list[str]
    session_id: str | None = None


class RatingBody(BaseModel):
    sample_id: str
    rater_id: str
    simplicity: int
    accuracy: int
    completeness: int
    brevity: int


def create_app(store: SessionStore, cors_origins: list[str] | None = None) -> FastAPI:
    app = FastAPI(title="plainadapt annotation service")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=cors_origins or ["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.post("/session")
    def post_session(body: CreateSessionBody):
        try:
            runs = [ApproachRun.load(p) for p in body.run_paths]
            samples = corpus_mod.ingest(body.corpus_path)
            sources = {}
            for sample in samples:
                sources.setdefault(sample.pmid, sample.source.text())
            session = create_session(
                runs,
                sample_size=body.sample_size,
                seed=body.seed,
                sources=sources,
                rater_ids=body.rater_ids,
                session_id=body.session_id,
            )
        except (ValidationError, FileNotFoundError) as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        store.add_session(session)
        return {
            "session_id": session.session_id,
            "item_count": len(session.sample_ids),
            "rater_ids": session.rater_ids,
        }

    @app.get("/session/{session_id}/next")
    def get_next(session_id: str, rater: str):
        try:
            return store.next_item(session_id, rater)
        except NotFoundError as exc:
            raise HTTPException(status_code=404, detail=str(exc))

    @app.post("/session/{session_id}/rating")
    def post_rating(session_id: str, body: RatingBody):
        try:
            rating = LikertRating(
                session_id=session_id,
                sample_id=body.sample_id,
                rater_id=body.rater_id,
                simplicity=body.simplicity,
                accuracy=body.accuracy,
                completeness=body.completeness,
                brevity=body.brevity,
            )
            return store.submit_rating(rating)
        except ValidationError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        except NotFoundError as exc:
            raise HTTPException(status_code=404, detail=str(exc))
        except ConflictError as exc:
            raise HTTPException(status_code=409, detail=str(exc))

    @app.get("/session/{session_id}/aggregate")
    def get_aggregate(session_id: str, standardize: bool = False):
        try:
            return store.aggregate(session_id, standardize=standardize)
        except NotFoundError as exc:
            raise HTTPException(status_code=404, detail=str(exc))
        except ValidationError as exc:
            raise HTTPException(status_code=400, detail=str(exc))

    return app

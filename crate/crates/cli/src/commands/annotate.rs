use biomedner::annotate::{
    distill_pipeline, CandidateEchoClient, DistillConfig, DistillPaths, HttpChatClient, LlmClient,
};

use super::read_passages;
use crate::args::AnnotateArgs;
use crate::config::{ClientKind, Endpoint, PipelineConfig};
use crate::failure::Failure;

fn http_client(role: &str, endpoint: &Endpoint, key_var: &str) -> Result<Box<dyn LlmClient>, Failure> {
    if endpoint.base_url.is_empty() || endpoint.model.is_empty() {
        return Err(Failure::usage(format!("annotate.{role} needs base_url and model (or --{role}-url/--{role}-model)")));
    }
    Ok(Box::new(HttpChatClient::from_env(endpoint.base_url.clone(), endpoint.model.clone(), key_var)))
}

pub fn annotate(args: AnnotateArgs, mut config: PipelineConfig) -> Result<(), Failure> {
    let a = &mut config.annotate;
    if let Some(c) = args.client {
        a.client = c;
    }
    if let Some(n) = args.teacher_n {
        a.teacher_n = n;
    }
    if let Some(v) = args.teacher_url {
        a.teacher.base_url = v;
    }
    if let Some(v) = args.teacher_model {
        a.teacher.model = v;
    }
    if let Some(v) = args.student_url {
        a.student.base_url = v;
    }
    if let Some(v) = args.student_model {
        a.student.model = v;
    }
    if let Some(v) = args.api_key_env {
        a.api_key_env = v;
    }
    if let Some(v) = args.max_in_flight {
        a.max_in_flight = v;
    }
    config.validate()?;

    let a = &config.annotate;
    let (teacher, student): (Box<dyn LlmClient>, Box<dyn LlmClient>) = match a.client {
        ClientKind::Mock => (
            Box::new(CandidateEchoClient::new(a.mock_types.clone())),
            Box::new(CandidateEchoClient::new(a.mock_types.clone())),
        ),
        ClientKind::Http => {
            (http_client("teacher", &a.teacher, &a.api_key_env)?, http_client("student", &a.student, &a.api_key_env)?)
        }
    };
    let corpus = read_passages(&args.input)?;
    std::fs::create_dir_all(&args.out_dir)?;
    let paths = DistillPaths::in_dir(&args.out_dir, &args.stem);
    let distill = DistillConfig { teacher_n: a.teacher_n, max_in_flight: a.max_in_flight, ..DistillConfig::default() };
    let summary = distill_pipeline(&corpus, teacher.as_ref(), student.as_ref(), &distill, &paths)?;
    config.write_sidecar(&paths.annotated)?;
    eprintln!(
        "annotate: {} teacher, {} student, {} resumed; wrote {}",
        summary.teacher_annotated,
        summary.student_annotated,
        summary.resumed,
        paths.annotated.display()
    );
    if summary.dropped_entities > 0 {
        eprintln!("annotate: {} returned entities could not be aligned to tokens", summary.dropped_entities);
    }
    Ok(())
}
